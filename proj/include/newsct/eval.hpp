#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "newsct/recsys.hpp"

namespace newsct {

struct EvalPoint {
    std::string session_id;
    std::int64_t at = 0;
    int position = 0;  // prefix length at query time
    std::vector<ItemIndex> recommended;
    ItemIndex successor = -1;
    std::vector<ItemIndex> successors;      // S, all future items of the session
    std::vector<ItemIndex> fresh_snapshot;  // F at query time
    double s5 = 0.0, ap = 0.0, novelty = 0.0;
    double s5_personalized = 0.0;
};

struct MetricsReport {
    double s5 = 0.0, s5_stderr = 0.0;
    double map = 0.0, map_stderr = 0.0;
    double novelty = 0.0, novelty_stderr = 0.0;
    double s5_personalized = -1.0;  // < 0 when not computed
    std::size_t points = 0;
    std::size_t sessions = 0;
    std::size_t clicks = 0;
    std::size_t anomalies = 0;
};

double success_at_k(std::span<const ItemIndex> recommended, ItemIndex successor, int k = 5);
// P@k / AP per the ranked-retrieval definitions; empty overlap gives 0
double average_precision(std::span<const ItemIndex> recommended,
                         std::span<const ItemIndex> successors);
double mean_average_precision(std::span<const EvalPoint> points);
double novelty(std::span<const ItemIndex> recommended, std::span<const ItemIndex> fresh);

// omega * S@5 + (1 - omega) * novelty
double utility(const MetricsReport& report, double omega);

struct ReplayOptions {
    int k = 5;
    bool keep_points = false;
    bool personalized = false;  // also score R \ R_T with the most-popular top-5 removed
};

struct ReplayResult {
    MetricsReport report;
    std::vector<EvalPoint> points;  // only when keep_points
};

// Prequential replay: events in timestamp order; every click that is not the
// first of its session and has at least one successor yields an eval point
// (recommend, record, then learn). Publications only advance model state.
ReplayResult replay(const EventStream& stream, OnlineRecommender& model,
                    const ReplayOptions& options = {});

void report_to_json(std::ostream& out, const MetricsReport& report);
std::string report_csv_header();
std::string report_csv_row(const MetricsReport& report);

}  // namespace newsct
