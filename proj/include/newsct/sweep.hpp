#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "newsct/eval.hpp"

namespace newsct {

// One hyperparameter assignment of the sweep grid (the EPC's A)
struct Assignment {
    std::size_t popular_size = 60;
    std::size_t fresh_size = 10;
    std::string mixture = "std+pop+fresh";
    MixtureUpdate update = MixtureUpdate::Bayesian;

    // lexicographic order used for deterministic argmax tie-breaks
    auto key() const {
        return std::tuple(popular_size, fresh_size, mixture,
                          update == MixtureUpdate::Bayesian ? 1 : 0);
    }
};

struct SweepCell {
    Assignment assignment;
    MetricsReport report;
};

RecommenderConfig apply_assignment(RecommenderConfig base, const Assignment& a);

// Runs one replay per assignment; cells are independent model instances and
// may run in parallel (jobs > 1) with identical results.
std::vector<SweepCell> run_sweep(const EventStream& stream, const RecommenderConfig& base,
                                 const TopicModel* topics, std::span<const Assignment> grid,
                                 int jobs = 1);

struct EpcRow {
    double omega = 0.0;
    double tune_utility = 0.0;
    double test_utility = 0.0;
    Assignment best;
};

// For each omega picks A* = argmax over the tune cells (ties by Assignment::key)
// and reports the matching test cell's utility. tune and test must hold the
// same assignments in the same order.
std::vector<EpcRow> epc_curve(std::span<const SweepCell> tune, std::span<const SweepCell> test,
                              std::span<const double> omegas);

std::string update_name(MixtureUpdate u);
MixtureUpdate parse_update(const std::string& name);

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);
void write_epc_csv(std::ostream& out, std::span<const EpcRow> rows);

}  // namespace newsct
