#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "newsct/baselines.hpp"
#include "newsct/eval.hpp"
#include "newsct/recsys.hpp"
#include "newsct/sweep.hpp"
#include "newsct/synth.hpp"
#include "newsct/topics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace newsct;

namespace {

constexpr const char* kVersion = "newsct 0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    std::ostringstream os;
    os << "fnv1a:" << std::hex << h;
    return os.str();
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

class ManifestTimer {
public:
    ManifestTimer(std::string command, json config, std::uint64_t seed)
        : start_(std::chrono::steady_clock::now()) {
        manifest_["tool_version"] = kVersion;
        manifest_["command"] = std::move(command);
        manifest_["config"] = std::move(config);
        manifest_["seed"] = seed;
        manifest_["inputs"] = json::object();
    }

    void input(const std::string& name, const fs::path& path) {
        manifest_["inputs"][name] = {{"path", path.string()}, {"digest", file_digest(path)}};
    }

    void write(const fs::path& path) {
        auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_["duration_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
        open_output(path) << manifest_.dump(2) << '\n';
    }

private:
    std::chrono::steady_clock::time_point start_;
    json manifest_;
};

EventStream load_stream(const fs::path& items, const fs::path& clicks) {
    auto is = open_input(items);
    auto cs = open_input(clicks);
    auto stream = parse_events(is, cs);
    if (stream.rejected > 0)
        std::cerr << "warning: skipped " << stream.rejected << " invalid record(s)\n";
    return stream;
}

// flags shared by replay/sweep/epc
struct ModelFlags {
    std::string variant = "vmm";
    std::string mixture = "std+pop+fresh";
    std::string update = "bayesian";
    double alpha0 = 0.01;
    int max_depth = 8;
    std::size_t popular_size = 60;
    std::size_t fresh_size = 10;
    int k = 5;
    bool exhaustive = false;
    std::string topic_model_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--variant", variant, "vmm | cvmm | hvmm | kct");
        cmd->add_option("--mixture", mixture, "std | std+pop | std+fresh | std+pop+fresh");
        cmd->add_option("--mixture-update", update, "bayesian | dirichlet");
        cmd->add_option("--alpha0", alpha0, "Dirichlet smoothing parameter");
        cmd->add_option("--max-depth", max_depth, "suffix-tree depth bound D");
        cmd->add_option("--popular-size", popular_size, "click window size r (|P| bound)");
        cmd->add_option("--fresh-size", fresh_size, "fresh set capacity s");
        cmd->add_option("--k", k, "recommendation list length");
        cmd->add_flag("--exhaustive-candidates", exhaustive,
                      "score every published item instead of the restricted candidate set");
        cmd->add_option("--topic-model", topic_model_path,
                        "topic model file (required for cvmm/hvmm/kct)");
    }

    RecommenderConfig config() const {
        RecommenderConfig cfg;
        cfg.variant = parse_variant(variant);
        set_mixture(cfg.experts, mixture);
        cfg.experts.update = parse_update(update);
        cfg.experts.alpha0 = alpha0;
        cfg.max_depth = max_depth;
        cfg.popular_size = popular_size;
        cfg.fresh_size = fresh_size;
        cfg.k_rec = k;
        cfg.exhaustive_candidates = exhaustive;
        return cfg;
    }

    json snapshot() const {
        return {{"variant", variant},         {"mixture", mixture},
                {"mixture_update", update},   {"alpha0", alpha0},
                {"max_depth", max_depth},     {"popular_size", popular_size},
                {"fresh_size", fresh_size},   {"k", k},
                {"exhaustive", exhaustive},   {"topic_model", topic_model_path}};
    }

    // throws UsageError when the variant needs topics but none was given
    std::optional<TopicModel> load_topics(const Corpus& corpus) const {
        if (parse_variant(variant) == Variant::VMM) return std::nullopt;
        if (topic_model_path.empty())
            throw UsageError("variant " + variant + " requires --topic-model");
        auto in = open_input(topic_model_path);
        return load_topic_model(in, corpus);
    }
};

SynthConfig synth_config_from_json(const json& j) {
    SynthConfig cfg;
    cfg.items = j.value("items", cfg.items);
    cfg.sessions = j.value("sessions", cfg.sessions);
    cfg.vocab = j.value("vocab", cfg.vocab);
    cfg.topics = j.value("topics", cfg.topics);
    cfg.markov_order = j.value("markov_order", cfg.markov_order);
    cfg.popularity_skew = j.value("popularity_skew", cfg.popularity_skew);
    cfg.breaking_fraction = j.value("breaking_fraction", cfg.breaking_fraction);
    cfg.noise = j.value("noise", cfg.noise);
    cfg.successor_skew = j.value("successor_skew", cfg.successor_skew);
    cfg.publish_spread = j.value("publish_spread", cfg.publish_spread);
    cfg.mean_session_length = j.value("mean_session_length", cfg.mean_session_length);
    cfg.doc_length = j.value("doc_length", cfg.doc_length);
    cfg.doc_topic_concentration = j.value("doc_topic_concentration", cfg.doc_topic_concentration);
    cfg.topic_word_concentration =
        j.value("topic_word_concentration", cfg.topic_word_concentration);
    return cfg;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

int cmd_synth(const fs::path& config_path, const fs::path& out_dir, std::uint64_t seed) {
    json jcfg = json::parse(open_input(config_path));
    SynthConfig cfg = synth_config_from_json(jcfg);
    ManifestTimer manifest("synth", jcfg, seed);
    manifest.input("config", config_path);

    SynthResult result = synth_generate(cfg, seed);
    auto items_out = open_output(out_dir / "items.jsonl");
    write_items_jsonl(items_out, result.stream.corpus);
    auto clicks_out = open_output(out_dir / "clicks.csv");
    write_clicks_csv(clicks_out, result.stream);

    json transitions{{"order", result.truth.order}, {"noise", result.truth.noise}};
    json rules = json::array();
    for (const auto& [ctx, succ] : result.truth.successor)
        rules.push_back({{"context", ctx}, {"successor", succ}});
    transitions["successors"] = std::move(rules);
    open_output(out_dir / "transitions.json") << transitions.dump(2) << '\n';

    json topics{{"phi", matrix_to_json(result.truth.phi)},
                {"theta", matrix_to_json(result.truth.theta)}};
    open_output(out_dir / "topics_truth.json") << topics.dump(2) << '\n';

    manifest.write(out_dir / "manifest.json");
    return 0;
}

int cmd_topics(const fs::path& items_path, int Z, int iters, std::uint64_t seed, double alpha,
               double beta, const fs::path& stopwords_path, const fs::path& out_path) {
    ManifestTimer manifest("topics",
                           {{"Z", Z},
                            {"iterations", iters},
                            {"alpha", alpha},
                            {"beta", beta},
                            {"stopwords", stopwords_path.string()}},
                           seed);
    manifest.input("items", items_path);

    auto is = open_input(items_path);
    std::istringstream no_clicks("session_id,item_id,timestamp\n");
    auto stream = parse_events(is, no_clicks);

    auto stopwords = default_stopwords();
    if (!stopwords_path.empty()) {
        auto sw = open_input(stopwords_path);
        stopwords = load_stopwords(sw);
        manifest.input("stopwords", stopwords_path);
    }
    auto [docs, vocab] = tokenize_corpus(stream.corpus, stopwords);
    TopicModel model = lda_fit(docs, static_cast<int>(stream.corpus.items.size()), vocab.size(),
                               Z, alpha, beta, iters, seed);
    model.vocab = std::move(vocab);
    auto model_out = open_output(out_path);
    save_topic_model(model_out, model, stream.corpus);
    manifest.write(fs::path(out_path.string() + ".manifest.json"));
    return 0;
}

int cmd_replay(const fs::path& items_path, const fs::path& clicks_path, const ModelFlags& flags,
               bool personalized, const fs::path& out_path, const fs::path& points_path) {
    ManifestTimer manifest("replay", flags.snapshot(), 0);
    manifest.input("items", items_path);
    manifest.input("clicks", clicks_path);

    auto stream = load_stream(items_path, clicks_path);
    auto topics = flags.load_topics(stream.corpus);
    if (topics) manifest.input("topic_model", flags.topic_model_path);

    CtRecommender model(flags.config(), topics ? &*topics : nullptr);
    ReplayOptions opt;
    opt.k = flags.k;
    opt.personalized = personalized;
    opt.keep_points = !points_path.empty();
    auto result = replay(stream, model, opt);

    auto report_out = open_output(out_path);
    report_to_json(report_out, result.report);
    if (!points_path.empty()) {
        auto out = open_output(points_path);
        out << "session_id,position,timestamp,s5,ap,novelty\n";
        for (const EvalPoint& p : result.points)
            out << p.session_id << ',' << p.position << ',' << p.at << ',' << p.s5 << ',' << p.ap
                << ',' << p.novelty << '\n';
    }
    manifest.write(fs::path(out_path.string() + ".manifest.json"));
    return 0;
}

std::vector<Assignment> load_grid(const fs::path& path) {
    json j = json::parse(open_input(path));
    std::vector<Assignment> grid;
    for (const json& cell : j) {
        for (const auto& [key, _] : cell.items())
            if (key != "popular_size" && key != "fresh_size" && key != "mixture" &&
                key != "mixture_update")
                throw UsageError("unknown grid key: " + key);
        Assignment a;
        a.popular_size = cell.value("popular_size", a.popular_size);
        a.fresh_size = cell.value("fresh_size", a.fresh_size);
        a.mixture = cell.value("mixture", a.mixture);
        a.update = parse_update(cell.value("mixture_update", std::string("bayesian")));
        {  // validate eagerly so a bad grid is a usage error
            ExpertConfig probe;
            set_mixture(probe, a.mixture);
        }
        grid.push_back(std::move(a));
    }
    if (grid.empty()) throw UsageError("empty grid: " + path.string());
    return grid;
}

int cmd_sweep(const fs::path& items_path, const fs::path& clicks_path, const fs::path& grid_path,
              const ModelFlags& flags, int jobs, const fs::path& out_path) {
    ManifestTimer manifest("sweep", flags.snapshot(), 0);
    manifest.input("items", items_path);
    manifest.input("clicks", clicks_path);
    manifest.input("grid", grid_path);

    auto stream = load_stream(items_path, clicks_path);
    auto grid = load_grid(grid_path);
    auto topics = flags.load_topics(stream.corpus);
    auto cells = run_sweep(stream, flags.config(), topics ? &*topics : nullptr, grid, jobs);
    auto csv_out = open_output(out_path);
    write_sweep_csv(csv_out, cells);
    manifest.write(fs::path(out_path.string() + ".manifest.json"));
    return 0;
}

int cmd_epc(const fs::path& tune_items, const fs::path& tune_clicks, const fs::path& test_items,
            const fs::path& test_clicks, const fs::path& grid_path,
            const std::vector<double>& omegas, const ModelFlags& flags, int jobs,
            const fs::path& out_path) {
    ManifestTimer manifest("epc", flags.snapshot(), 0);
    manifest.input("tune_items", tune_items);
    manifest.input("tune_clicks", tune_clicks);
    manifest.input("test_items", test_items);
    manifest.input("test_clicks", test_clicks);
    manifest.input("grid", grid_path);

    auto tune_stream = load_stream(tune_items, tune_clicks);
    auto test_stream = load_stream(test_items, test_clicks);
    auto grid = load_grid(grid_path);
    auto tune_topics = flags.load_topics(tune_stream.corpus);
    auto test_topics = flags.load_topics(test_stream.corpus);

    auto tune_cells = run_sweep(tune_stream, flags.config(),
                                tune_topics ? &*tune_topics : nullptr, grid, jobs);
    auto test_cells = run_sweep(test_stream, flags.config(),
                                test_topics ? &*test_topics : nullptr, grid, jobs);
    auto rows = epc_curve(tune_cells, test_cells, omegas);
    auto csv_out = open_output(out_path);
    write_epc_csv(csv_out, rows);
    manifest.write(fs::path(out_path.string() + ".manifest.json"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-tree news recommendation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic click log");
    std::string synth_config, synth_out = "synth_out";
    std::uint64_t synth_seed = 1;
    synth->add_option("--config", synth_config, "generator config (JSON)")->required();
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--seed", synth_seed, "master seed");

    // topics
    auto* topics = app.add_subcommand("topics", "fit an LDA topic model over an item file");
    std::string topics_items, topics_out = "topics.json", topics_stopwords;
    int topics_z = 50, topics_iters = 500;
    double topics_alpha = 0.0, topics_beta = 0.0;
    std::uint64_t topics_seed = 1;
    topics->add_option("--items", topics_items, "items file (JSONL)")->required();
    topics->add_option("--topics", topics_z, "number of topics Z")
        ->check(CLI::PositiveNumber);
    topics->add_option("--iters", topics_iters, "Gibbs sweeps")->check(CLI::PositiveNumber);
    topics->add_option("--alpha", topics_alpha, "document-topic prior (<=0 uses 50/Z)");
    topics->add_option("--beta", topics_beta, "topic-word prior (<=0 uses 0.01)");
    topics->add_option("--stopwords", topics_stopwords, "stopword file, one word per line");
    topics->add_option("--seed", topics_seed, "sampler seed");
    topics->add_option("--out", topics_out, "model output path");

    // replay
    auto* rp = app.add_subcommand("replay", "prequential replay of a click log");
    std::string rp_items, rp_clicks, rp_out = "report.json", rp_points;
    bool rp_personalized = false;
    ModelFlags rp_flags;
    rp->add_option("--items", rp_items, "items file (JSONL)")->required();
    rp->add_option("--clicks", rp_clicks, "clicks file (CSV)")->required();
    rp->add_option("--out", rp_out, "metrics report output path");
    rp->add_option("--points", rp_points, "optional per-point CSV output");
    rp->add_flag("--personalized", rp_personalized,
                 "also score with the most-popular top-5 removed");
    rp_flags.attach(rp);

    // sweep
    auto* sw = app.add_subcommand("sweep", "replay a grid of hyperparameter assignments");
    std::string sw_items, sw_clicks, sw_grid, sw_out = "sweep.csv";
    int sw_jobs = 1;
    ModelFlags sw_flags;
    sw->add_option("--items", sw_items, "items file (JSONL)")->required();
    sw->add_option("--clicks", sw_clicks, "clicks file (CSV)")->required();
    sw->add_option("--grid", sw_grid, "grid file (JSON array of assignments)")->required();
    sw->add_option("--jobs", sw_jobs, "parallel grid cells")->check(CLI::PositiveNumber);
    sw->add_option("--out", sw_out, "sweep CSV output path");
    sw_flags.attach(sw);

    // epc
    auto* epc = app.add_subcommand("epc", "expected performance curve over tune/test logs");
    std::string epc_tune_items, epc_tune_clicks, epc_test_items, epc_test_clicks, epc_grid;
    std::string epc_out = "epc.csv";
    std::vector<double> epc_omegas{0.0, 0.25, 0.5, 0.75, 1.0};
    int epc_jobs = 1;
    ModelFlags epc_flags;
    epc->add_option("--tune-items", epc_tune_items)->required();
    epc->add_option("--tune-clicks", epc_tune_clicks)->required();
    epc->add_option("--test-items", epc_test_items)->required();
    epc->add_option("--test-clicks", epc_test_clicks)->required();
    epc->add_option("--grid", epc_grid, "grid file (JSON array of assignments)")->required();
    epc->add_option("--omegas", epc_omegas, "utility trade-off weights");
    epc->add_option("--jobs", epc_jobs, "parallel grid cells")->check(CLI::PositiveNumber);
    epc->add_option("--out", epc_out, "EPC CSV output path");
    epc_flags.attach(epc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems and --help both route through exit()
    }

    try {
        if (*synth) return cmd_synth(synth_config, synth_out, synth_seed);
        if (*topics)
            return cmd_topics(topics_items, topics_z, topics_iters, topics_seed, topics_alpha,
                              topics_beta, topics_stopwords, topics_out);
        if (*rp) return cmd_replay(rp_items, rp_clicks, rp_flags, rp_personalized, rp_out, rp_points);
        if (*sw) return cmd_sweep(sw_items, sw_clicks, sw_grid, sw_flags, sw_jobs, sw_out);
        if (*epc)
            return cmd_epc(epc_tune_items, epc_tune_clicks, epc_test_items, epc_test_clicks,
                           epc_grid, epc_omegas, epc_flags, epc_jobs, epc_out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
