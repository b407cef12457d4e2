#pragma once

// Parameter sweeps over 1-2 axes with a deterministic, order-preserving
// worker pool, plus CSV emission with a reproducibility header.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "oamem/scenario.hpp"

namespace oamem {

struct OutputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

namespace sweep_detail {

inline std::vector<double> axis_grid(const SweepAxis& ax) {
    if (ax.points < 1) throw std::invalid_argument("sweep axis '" + ax.name + "' has no points");
    std::vector<double> vs(ax.points);
    if (ax.points == 1) {
        vs[0] = ax.start;
    } else {
        for (int i = 0; i < ax.points; ++i)
            vs[i] = ax.start + (ax.stop - ax.start) * double(i) / double(ax.points - 1);
    }
    std::sort(vs.begin(), vs.end());
    return vs;
}

inline void apply_axis(ProtocolConfig& cfg, const std::string& name, double value) {
    if (name == "T_en_K")
        cfg.env.T_en = value;
    else if (name == "g_over_Gamma")
        cfg.coupling.g1 = cfg.coupling.g2 = value * cfg.wg.Gamma;
    else if (name == "k_per_m")
        cfg.selector.k = value;
    else if (name == "tau_s_ns")
        cfg.schedule.tau_s = value * 1e-9;
    else if (name == "eta")
        cfg.scenario.eta = value;
    else if (name == "r")
        cfg.scenario.r = value;
    else
        throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

}  // namespace sweep_detail

inline OutputTable run_sweep(const ProtocolConfig& base, const SweepSpec& spec, int jobs = 0) {
    using sweep_detail::apply_axis;
    using sweep_detail::axis_grid;
    if (spec.axes.size() > 2) throw std::invalid_argument("at most two sweep axes");

    std::vector<std::vector<double>> grids;
    for (const SweepAxis& ax : spec.axes) grids.push_back(axis_grid(ax));

    std::vector<std::vector<double>> points;  // axis values per row, lexicographic
    if (grids.empty()) {
        points.push_back({});
    } else if (grids.size() == 1) {
        for (double v : grids[0]) points.push_back({v});
    } else {
        for (double v1 : grids[0])
            for (double v2 : grids[1]) points.push_back({v1, v2});
    }

    OutputTable table;
    for (const SweepAxis& ax : spec.axes) table.columns.push_back(ax.name);
    const std::vector<std::string> metrics = {"fidelity",    "log_negativity",
                                              "squeezing_factor", "squeezing_dB",
                                              "tau1_ns",     "tau2_ns",
                                              "numeric_fallback", "valid"};
    table.columns.insert(table.columns.end(), metrics.begin(), metrics.end());
    table.rows.assign(points.size(), {});

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto compute = [&](std::size_t idx) {
        std::vector<double>& row = table.rows[idx];
        row = points[idx];
        ProtocolConfig cfg = base;
        for (std::size_t a = 0; a < spec.axes.size(); ++a)
            apply_axis(cfg, spec.axes[a].name, points[idx][a]);
        try {
            ProtocolResult res = run_protocol(cfg);
            bool ent = cfg.scenario.kind == ScenarioKind::entangled;
            row.push_back(res.fidelity);
            row.push_back(ent ? res.log_negativity : nan);
            row.push_back(ent ? nan : res.squeezing_factor_out);
            row.push_back(ent ? nan : squeezing_factor_db(res.retrieved_state, 0));
            row.push_back(res.tau1 * 1e9);
            row.push_back(res.tau2 * 1e9);
            row.push_back(res.numeric_fallback ? 1.0 : 0.0);
            row.push_back(1.0);
        } catch (const std::exception&) {
            row.resize(points[idx].size());
            for (int i = 0; i < 6; ++i) row.push_back(nan);
            row.push_back(0.0);  // numeric_fallback
            row.push_back(0.0);  // valid
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_workers = jobs > 0 ? std::size_t(jobs) : std::size_t(hw ? hw : 1);
    n_workers = std::min(n_workers, points.size());
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) compute(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < points.size();
                     i = next.fetch_add(1))
                    compute(i);
            });
        for (std::thread& t : pool) t.join();
    }
    return table;
}

constexpr char tool_version[] = "0.1.0";

inline void emit_csv(const OutputTable& table, std::ostream& os) {
    char buf[64];
    os << "# oamem " << tool_version << "\n";
    os << "# seed = " << table.seed << "\n";
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(table.config_hash));
    os << "# config = " << buf << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << "\n";
    for (const std::vector<double>& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::logic_error("ragged output table");
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", row[c]);
            os << (c ? "," : "") << buf;
        }
        os << "\n";
    }
}

inline void emit_csv(const OutputTable& table, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    emit_csv(table, os);
    os.flush();
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace oamem
