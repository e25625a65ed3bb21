#include "newsct/sweep.hpp"

#include <atomic>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace newsct {

RecommenderConfig apply_assignment(RecommenderConfig base, const Assignment& a) {
    base.popular_size = a.popular_size;
    base.fresh_size = a.fresh_size;
    set_mixture(base.experts, a.mixture);
    base.experts.update = a.update;
    return base;
}

std::vector<SweepCell> run_sweep(const EventStream& stream, const RecommenderConfig& base,
                                 const TopicModel* topics, std::span<const Assignment> grid,
                                 int jobs) {
    std::vector<SweepCell> cells(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            cells[i].assignment = grid[i];
            CtRecommender model(apply_assignment(base, grid[i]), topics);
            cells[i].report = replay(stream, model).report;
        }
    };
    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return cells;
}

std::vector<EpcRow> epc_curve(std::span<const SweepCell> tune, std::span<const SweepCell> test,
                              std::span<const double> omegas) {
    if (tune.size() != test.size() || tune.empty())
        throw std::invalid_argument("epc_curve: tune/test grids must match and be non-empty");
    std::vector<EpcRow> rows;
    rows.reserve(omegas.size());
    for (double omega : omegas) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < tune.size(); ++i) {
            double u = utility(tune[i].report, omega);
            double ub = utility(tune[best].report, omega);
            if (u > ub || (u == ub && tune[i].assignment.key() < tune[best].assignment.key()))
                best = i;
        }
        rows.push_back({omega, utility(tune[best].report, omega), utility(test[best].report, omega),
                        tune[best].assignment});
    }
    return rows;
}

std::string update_name(MixtureUpdate u) {
    return u == MixtureUpdate::Bayesian ? "bayesian" : "dirichlet";
}

MixtureUpdate parse_update(const std::string& name) {
    if (name == "bayesian") return MixtureUpdate::Bayesian;
    if (name == "dirichlet") return MixtureUpdate::Dirichlet;
    throw std::invalid_argument("unknown mixture_update: " + name);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
    out << "popular_size,fresh_size,mixture,mixture_update," << report_csv_header() << '\n';
    for (const SweepCell& c : cells) {
        out << c.assignment.popular_size << ',' << c.assignment.fresh_size << ','
            << c.assignment.mixture << ',' << update_name(c.assignment.update) << ','
            << report_csv_row(c.report) << '\n';
    }
}

void write_epc_csv(std::ostream& out, std::span<const EpcRow> rows) {
    out << "omega,tune_utility,test_utility,popular_size,fresh_size,mixture,mixture_update\n";
    for (const EpcRow& r : rows) {
        out << r.omega << ',' << r.tune_utility << ',' << r.test_utility << ','
            << r.best.popular_size << ',' << r.best.fresh_size << ',' << r.best.mixture << ','
            << update_name(r.best.update) << '\n';
    }
}

}  // namespace newsct
