#include "newsct/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "newsct/baselines.hpp"

namespace newsct {

double success_at_k(std::span<const ItemIndex> recommended, ItemIndex successor, int k) {
    std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, k)), recommended.size());
    for (std::size_t i = 0; i < limit; ++i)
        if (recommended[i] == successor) return 1.0;
    return 0.0;
}

double average_precision(std::span<const ItemIndex> recommended,
                         std::span<const ItemIndex> successors) {
    std::unordered_set<ItemIndex> relevant(successors.begin(), successors.end());
    int hits = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < recommended.size(); ++k) {
        if (relevant.count(recommended[k])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return hits == 0 ? 0.0 : sum / hits;
}

double mean_average_precision(std::span<const EvalPoint> points) {
    if (points.empty()) return 0.0;
    double sum = 0.0;
    for (const EvalPoint& p : points) sum += p.ap;
    return sum / static_cast<double>(points.size());
}

double novelty(std::span<const ItemIndex> recommended, std::span<const ItemIndex> fresh) {
    if (recommended.empty()) return 0.0;
    std::unordered_set<ItemIndex> fresh_set(fresh.begin(), fresh.end());
    std::size_t hits = 0;
    for (ItemIndex n : recommended)
        if (fresh_set.count(n)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(recommended.size());
}

double utility(const MetricsReport& report, double omega) {
    return omega * report.s5 + (1.0 - omega) * report.novelty;
}

namespace {

struct Accumulator {
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
    void add(double x) { sum += x; sumsq += x * x; ++n; }
    double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
    double stderr_() const {
        if (n < 2) return 0.0;
        double m = mean();
        double var = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    }
};

}  // namespace

ReplayResult replay(const EventStream& stream, OnlineRecommender& model,
                    const ReplayOptions& options) {
    ReplayResult result;

    // collapsed per-session click sequences for the successor sets; ground
    // truth only, the model never sees them ahead of time
    std::unordered_map<std::string, std::vector<ItemIndex>> full;
    for (const Event& e : stream.events) {
        if (e.kind != Event::Kind::Click) continue;
        auto& seq = full[e.session_id];
        if (!seq.empty() && seq.back() == e.item) continue;
        seq.push_back(e.item);
    }

    Accumulator s5_acc, ap_acc, nov_acc, perso_acc;
    std::unordered_map<std::string, std::size_t> progress;  // collapsed position per session

    for (const Event& e : stream.events) {
        if (e.kind == Event::Kind::Publish) {
            model.on_publish(e.item);
            continue;
        }
        ++result.report.clicks;
        auto& seq = full[e.session_id];
        auto [pit, inserted] = progress.emplace(e.session_id, 0);
        if (inserted) ++result.report.sessions;
        std::size_t pos = pit->second;
        if (pos > 0 && seq[pos - 1] == e.item) continue;  // consecutive duplicate (reload)
        if (pos >= seq.size() || seq[pos] != e.item) {
            ++result.report.anomalies;  // stream disagrees with its own sessions
            continue;
        }
        std::span<const ItemIndex> prefix(seq.data(), pos);

        if (pos >= 1 && pos < seq.size()) {
            // query with non-empty successor set; final clicks produce no point
            EvalPoint point;
            point.session_id = e.session_id;
            point.at = e.at;
            point.position = static_cast<int>(pos);
            point.successor = e.item;
            point.successors.assign(seq.begin() + static_cast<std::ptrdiff_t>(pos), seq.end());
            point.fresh_snapshot = model.stats().fresh_items();
            Recommendation rec = model.recommend(prefix, options.k);
            point.recommended.reserve(rec.size());
            for (const ScoredItem& s : rec) point.recommended.push_back(s.item);

            point.s5 = success_at_k(point.recommended, point.successor, options.k);
            point.ap = average_precision(point.recommended, point.successors);
            point.novelty = novelty(point.recommended, point.fresh_snapshot);
            s5_acc.add(point.s5);
            ap_acc.add(point.ap);
            nov_acc.add(point.novelty);

            if (options.personalized) {
                Recommendation popular = most_popular(model.stats(), options.k);
                std::unordered_set<ItemIndex> top;
                for (const ScoredItem& s : popular) top.insert(s.item);
                std::vector<ItemIndex> reduced;
                for (ItemIndex n : point.recommended)
                    if (!top.count(n)) reduced.push_back(n);
                point.s5_personalized = success_at_k(reduced, point.successor, options.k);
                perso_acc.add(point.s5_personalized);
            }
            if (options.keep_points) result.points.push_back(std::move(point));
        }

        model.step(prefix, e.item);
        pit->second = pos + 1;
    }

    MetricsReport& r = result.report;
    r.points = s5_acc.n;
    r.s5 = s5_acc.mean();
    r.s5_stderr = s5_acc.stderr_();
    r.map = ap_acc.mean();
    r.map_stderr = ap_acc.stderr_();
    r.novelty = nov_acc.mean();
    r.novelty_stderr = nov_acc.stderr_();
    if (options.personalized) r.s5_personalized = perso_acc.mean();
    return result;
}

void report_to_json(std::ostream& out, const MetricsReport& r) {
    nlohmann::json j{{"averaging", "per eval point (per click)"},
                     {"s5", r.s5},
                     {"s5_ci95", 1.96 * r.s5_stderr},
                     {"map", r.map},
                     {"map_ci95", 1.96 * r.map_stderr},
                     {"novelty", r.novelty},
                     {"novelty_ci95", 1.96 * r.novelty_stderr},
                     {"points", r.points},
                     {"sessions", r.sessions},
                     {"clicks", r.clicks},
                     {"anomalies", r.anomalies}};
    if (r.s5_personalized >= 0.0) j["s5_personalized"] = r.s5_personalized;
    out << j.dump(2) << '\n';
}

std::string report_csv_header() {
    return "s5,s5_ci95,map,map_ci95,novelty,novelty_ci95,points,sessions,clicks,anomalies";
}

std::string report_csv_row(const MetricsReport& r) {
    std::ostringstream os;
    os << r.s5 << ',' << 1.96 * r.s5_stderr << ',' << r.map << ',' << 1.96 * r.map_stderr << ','
       << r.novelty << ',' << 1.96 * r.novelty_stderr << ',' << r.points << ',' << r.sessions
       << ',' << r.clicks << ',' << r.anomalies;
    return os.str();
}

}  // namespace newsct
