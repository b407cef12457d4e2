#pragma once

// Convenience include for the whole library.

#include "oamem/analytic.hpp"
#include "oamem/dynamics.hpp"
#include "oamem/gaussian.hpp"
#include "oamem/params.hpp"
#include "oamem/protocol.hpp"
#include "oamem/scenario.hpp"
#include "oamem/sweep.hpp"
#include "oamem/validation.hpp"
