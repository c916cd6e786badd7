#include "kge/evaluator.hpp"

#include <cmath>
#include <cstdio>

namespace kge {

ProportionTest proportion_test(double p_hat, double p0, std::size_t num) {
    if (!(p0 > 0.0 && p0 < 1.0)) throw DimensionError("proportion_test: p0 must be in (0,1)");
    if (num < 1) throw DimensionError("proportion_test: num must be >= 1");
    ProportionTest out;
    out.z = (p_hat - p0) / std::sqrt(p0 * (1.0 - p0) / static_cast<double>(num));
    out.significant_at_5pct = std::fabs(out.z) > 1.96;
    return out;
}

std::string format_report_table(const MetricReport& report) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-10s %10s %10s\n", "metric", "raw", "filtered");
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-10s %10.4f %10.4f\n", "mrr", report.mrr_raw,
                  report.mrr_filtered);
    out += buf;
    for (const auto& [k, v] : report.hits_raw) {
        std::snprintf(buf, sizeof(buf), "hits@%-5d %10.4f %10.4f\n", k, v,
                      report.hits_filtered.at(k));
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-10s %10zu\n", "queries", report.n_queries);
    out += buf;
    return out;
}

std::string format_report_kv(const MetricReport& report) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mrr_raw=%.17g\n", report.mrr_raw);
    out += buf;
    std::snprintf(buf, sizeof(buf), "mrr_filt=%.17g\n", report.mrr_filtered);
    out += buf;
    for (const auto& [k, v] : report.hits_raw) {
        std::snprintf(buf, sizeof(buf), "hits%d_raw=%.17g\n", k, v);
        out += buf;
    }
    for (const auto& [k, v] : report.hits_filtered) {
        std::snprintf(buf, sizeof(buf), "hits%d_filt=%.17g\n", k, v);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "n_queries=%zu\n", report.n_queries);
    out += buf;
    return out;
}

}  // namespace kge
