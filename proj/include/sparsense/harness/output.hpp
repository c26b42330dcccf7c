#pragma once

// CSV and gnuplot emission for experiment results.

#include "sparsense/harness/experiment.hpp"

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

namespace sparsense {

namespace detail {

inline std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Budget column: mean adaptive s, the fixed s, or empty.
inline std::string budget_cell(const AlgorithmEntry& a, const Curve& c, std::size_t i) {
    if (!c.s_mean.empty()) return fixed(c.s_mean[i], 3);
    if (uses_budget(a.config.variant) && !a.config.adaptive()) return std::to_string(std::get<std::size_t>(a.config.s));
    return {};
}

} // namespace detail

/// One row per (algorithm, iteration):
/// experiment,label,iteration,rmse_db,s_est_mean
inline void write_curves_csv(const ExperimentResult& result, std::ostream& out) {
    out << "experiment,label,iteration,rmse_db,s_est_mean\n";
    for (std::size_t a = 0; a < result.curves.size(); ++a) {
        const auto& c = result.curves[a];
        const auto& alg = result.spec.algorithms[a];
        for (std::size_t i = 0; i < c.rmse_db.size(); ++i)
            out << result.spec.name << ',' << c.label << ',' << i + 1 << ',' << detail::fixed(c.rmse_db[i]) << ','
                << detail::budget_cell(alg, c, i) << '\n';
    }
}

/// Gnuplot layout: one whitespace-separated block per algorithm, blocks
/// separated by two blank lines so `index` selects them.
inline void write_curves_gnuplot(const ExperimentResult& result, std::ostream& out) {
    for (std::size_t a = 0; a < result.curves.size(); ++a) {
        const auto& c = result.curves[a];
        if (a) out << "\n\n";
        out << "# " << result.spec.name << ' ' << c.label << "\n# iteration rmse_db s_est_mean\n";
        for (std::size_t i = 0; i < c.rmse_db.size(); ++i) {
            const std::string s = detail::budget_cell(result.spec.algorithms[a], c, i);
            out << i + 1 << ' ' << detail::fixed(c.rmse_db[i]) << ' ' << (s.empty() ? "-" : s) << '\n';
        }
    }
}

/// Per-algorithm summary. Steady state is the linear mean over the final
/// pass (the last M iterations). Wall-clock times are left out so the file
/// is reproducible byte for byte.
inline void write_summary_csv(const ExperimentResult& result, std::ostream& out) {
    out << "experiment,label,trials,final_rmse_db,steady_rmse_db,support_recovery_rate,final_s_mean\n";
    for (std::size_t a = 0; a < result.curves.size(); ++a) {
        const auto& c = result.curves[a];
        const auto& trials = result.records[a];
        double recovered = 0.0;
        for (const auto& t : trials) recovered += t.final_support == t.true_support ? 1.0 : 0.0;
        const double count = static_cast<double>(trials.size());
        out << result.spec.name << ',' << c.label << ',' << trials.size() << ',' << detail::fixed(c.rmse_db.back())
            << ',' << detail::fixed(tail_mean_db(c.rmse_db, result.spec.sensing.M)) << ','
            << detail::fixed(recovered / count, 4) << ','
            << detail::budget_cell(result.spec.algorithms[a], c, c.rmse_db.size() - 1) << '\n';
    }
}

/// experiment,M,label,steady_rmse_db
inline void write_sweep_csv(std::string_view name, const std::vector<SweepPoint>& points, std::ostream& out) {
    out << "experiment,M,label,steady_rmse_db\n";
    for (const auto& p : points) out << name << ',' << p.M << ',' << p.label << ',' << detail::fixed(p.steady_rmse_db) << '\n';
}

/// FNV-1a, used to pin regression outputs.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace sparsense
