#include "glyphwarp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "glyphwarp/metrics.hpp"
#include "glyphwarp/rng.hpp"

namespace glyphwarp {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

template <class T, class Parse>
std::vector<T> parse_all(const std::vector<std::string>& names, Parse parse) {
    std::vector<T> out;
    for (const auto& n : names) out.push_back(parse(n));
    return out;
}

int positive_int(const KeyValueConfig& cfg, const std::string& key, int fallback) {
    const auto v = cfg.get_int(key, fallback);
    if (v < 1) throw std::invalid_argument("config key '" + key + "' must be >= 1");
    return static_cast<int>(v);
}

std::uint64_t data_seed(std::uint64_t grid_seed, DataSetId id) {
    return RngStream(grid_seed).substream(0xDA7A0000u + static_cast<std::uint64_t>(id)).next_u64();
}

std::uint64_t model_seed(std::uint64_t grid_seed, ModelFamily f, DataSetId id, ClassSet task) {
    const std::uint64_t key = 0x40DE0000u + 0x100u * static_cast<std::uint64_t>(f) +
                              0x10u * static_cast<std::uint64_t>(id) + static_cast<std::uint64_t>(task);
    return RngStream(grid_seed).substream(key).next_u64();
}

std::string family_upper(ModelFamily f) { return f == ModelFamily::mlp ? "MLP" : "SDA"; }

}  // namespace

const char* to_string(ModelFamily f) { return f == ModelFamily::mlp ? "mlp" : "sda"; }

ModelFamily parse_model_family(const std::string& name) {
    const auto n = lower(name);
    if (n == "mlp") return ModelFamily::mlp;
    if (n == "sda") return ModelFamily::sda;
    throw std::invalid_argument("unknown model family '" + name + "'");
}

const char* to_string(DataSetId d) {
    switch (d) {
        case DataSetId::nist: return "nist";
        case DataSetId::nistp: return "nistp";
        case DataSetId::p07: return "p07";
    }
    return "?";
}

DataSetId parse_data_set(const std::string& name) {
    const auto n = lower(name);
    if (n == "nist" || n == "clean") return DataSetId::nist;
    if (n == "nistp") return DataSetId::nistp;
    if (n == "p07") return DataSetId::p07;
    throw std::invalid_argument("unknown data set '" + name + "'");
}

std::string model_name(ModelFamily f, DataSetId trained_on) {
    return family_upper(f) + std::to_string(static_cast<int>(trained_on));
}

ExperimentGrid ExperimentGrid::from_config(const KeyValueConfig& cfg) {
    ExperimentGrid g;
    if (cfg.has("models"))
        g.models = parse_all<ModelFamily>(cfg.get_list("models", {}), parse_model_family);
    if (cfg.has("train_sets"))
        g.train_sets = parse_all<DataSetId>(cfg.get_list("train_sets", {}), parse_data_set);
    if (cfg.has("eval_sets"))
        g.eval_sets = parse_all<DataSetId>(cfg.get_list("eval_sets", {}), parse_data_set);
    if (cfg.has("tasks")) g.tasks = parse_all<ClassSet>(cfg.get_list("tasks", {}), parse_class_set);
    g.single_task = cfg.get_bool("single_task", g.single_task);
    g.n_train = static_cast<std::size_t>(positive_int(cfg, "n_train", static_cast<int>(g.n_train)));
    g.n_valid = static_cast<std::size_t>(positive_int(cfg, "n_valid", static_cast<int>(g.n_valid)));
    g.n_test = static_cast<std::size_t>(positive_int(cfg, "n_test", static_cast<int>(g.n_test)));
    g.mix = cfg.get_string("mix", g.mix);
    g.threads = static_cast<unsigned>(positive_int(cfg, "threads", static_cast<int>(g.threads)));
    g.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(g.seed)));

    auto& h = g.hyper;
    h.learning_rates = cfg.get_doubles("learning_rates", h.learning_rates);
    h.pretrain_learning_rates = cfg.get_doubles("pretrain_learning_rates", h.pretrain_learning_rates);
    h.hidden_units = positive_int(cfg, "hidden", h.hidden_units);
    h.sda_width = positive_int(cfg, "sda_width", h.sda_width);
    h.corruption = cfg.get_double("corruption", h.corruption);
    h.tied = cfg.get_bool("tied", h.tied);
    h.minibatch = positive_int(cfg, "minibatch", h.minibatch);
    h.epochs = positive_int(cfg, "epochs", h.epochs);
    h.pretrain_epochs = static_cast<int>(cfg.get_int("pretrain_epochs", h.pretrain_epochs));

    if (g.models.empty() || g.train_sets.empty() || g.eval_sets.empty() || g.tasks.empty())
        throw std::invalid_argument("grid needs at least one model, train set, eval set and task");
    if (h.learning_rates.empty() || h.pretrain_learning_rates.empty())
        throw std::invalid_argument("grid needs at least one learning rate");
    for (double lr : h.learning_rates)
        if (!(lr >= 0.0)) throw std::invalid_argument("learning rates must be >= 0");
    if (!(h.corruption >= 0.0 && h.corruption < 1.0))
        throw std::invalid_argument("corruption must be in [0,1)");
    if (h.pretrain_epochs < 0) throw std::invalid_argument("pretrain_epochs must be >= 0");
    SourceMix::parse(g.mix).validate();
    return g;
}

// ------------------------------------------------------------------ results

const ResultRow* ResultTable::find(const std::string& model, const std::string& eval_set,
                                   const std::string& task, const std::string& setting) const {
    for (const auto& r : rows)
        if (r.model == model && r.eval_set == eval_set && r.task == task && r.setting == setting)
            return &r;
    return nullptr;
}

void write_results(const ResultTable& table, std::ostream& out) {
    out << kResultHeader << '\n';
    for (const auto& r : table.rows) {
        out << r.model << '\t' << r.train_set << '\t' << r.eval_set << '\t' << r.task << '\t'
            << r.setting << '\t' << fmt::format("{:.6f}", r.error) << '\t'
            << fmt::format("{:.6f}", r.stderr_) << '\t' << r.n << '\t' << r.status << '\n';
    }
}

ResultTable read_results(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("result table is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultHeader) throw std::runtime_error("result table has an unexpected header");
    ResultTable table;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream fields(line);
        std::string item;
        while (std::getline(fields, item, '\t')) f.push_back(item);
        if (f.size() != 9)
            throw std::runtime_error("result line " + std::to_string(lineno) + " needs 9 fields");
        ResultRow r;
        r.model = f[0];
        r.train_set = f[1];
        r.eval_set = f[2];
        r.task = f[3];
        r.setting = f[4];
        try {
            r.error = std::stod(f[5]);
            r.stderr_ = std::stod(f[6]);
            r.n = static_cast<std::size_t>(std::stoull(f[7]));
        } catch (const std::logic_error&) {
            throw std::runtime_error("result line " + std::to_string(lineno) + " has a bad number");
        }
        r.status = f[8];
        if (r.status == "ok" && !(r.error >= 0.0 && r.error <= 1.0 && r.stderr_ >= 0.0))
            throw std::runtime_error("result line " + std::to_string(lineno) + " is out of range");
        table.rows.push_back(std::move(r));
    }
    return table;
}

void save_results(const ResultTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_results(table, out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ResultTable load_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_results(in);
}

// ------------------------------------------------------------------- report

namespace {

struct TextTable {
    std::vector<std::vector<std::string>> cells;

    std::string render(const std::string& title) const {
        std::vector<std::size_t> width;
        for (const auto& row : cells)
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (width.size() <= c) width.push_back(0);
                width[c] = std::max(width[c], row[c].size());
            }
        std::string out = title + "\n";
        for (std::size_t r = 0; r < cells.size(); ++r) {
            std::string line;
            for (std::size_t c = 0; c < cells[r].size(); ++c) {
                const auto& s = cells[r][c];
                const std::string pad(width[c] - s.size(), ' ');
                line += c == 0 ? s + pad : "  " + pad + s;
            }
            out += line + "\n";
            if (r == 0) {
                std::size_t total = 0;
                for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
                out += std::string(total, '-') + "\n";
            }
        }
        return out;
    }
};

struct Column {
    const char* title;
    const char* eval_set;
    const char* task;
};

constexpr Column kColumns[] = {
    {"NIST test", "nist", "all"},
    {"NISTP test", "nistp", "all"},
    {"P07 test", "p07", "all"},
    {"NIST test digits", "nist", "digits"},
};

std::string percent(double rate) { return fmt::format("{:.2f}%", 100.0 * rate); }

std::string error_cell(const ResultRow* r) {
    if (r == nullptr) return "n/a";
    if (r->status != "ok") return "failed";
    return fmt::format("{} +/-{:.2f}%", percent(r->error), 100.0 * r->stderr_);
}

bool usable(const ResultRow* r) { return r != nullptr && r->status == "ok"; }

std::string ratio_cell(const ResultRow* num, const ResultRow* den, double (*metric)(double, double)) {
    if (!usable(num) || !usable(den)) return "n/a";
    try {
        return fmt::format("{:.1f}%", metric(num->error, den->error));
    } catch (const std::invalid_argument&) {
        return "undef";
    }
}

}  // namespace

std::string render_report(const ResultTable& table) {
    std::string out;

    TextTable t1;
    t1.cells.push_back({""});
    for (const auto& c : kColumns) t1.cells[0].push_back(c.title);
    for (const char* fam : {"SDA", "MLP"})
        for (int i = 0; i < 3; ++i) {
            const std::string model = fam + std::to_string(i);
            bool any = false;
            std::vector<std::string> row{model};
            for (const auto& c : kColumns) {
                const auto* r = table.find(model, c.eval_set, c.task);
                any = any || r != nullptr;
                row.push_back(error_cell(r));
            }
            if (any) t1.cells.push_back(std::move(row));
        }
    out += t1.render("Test error rates (+/- std. err.)");

    TextTable t2;
    t2.cells.push_back({""});
    for (const auto& c : kColumns) t2.cells[0].push_back(c.title);
    for (const char* fam : {"SDA", "MLP"})
        for (int i = 1; i < 3; ++i) {
            const std::string base = std::string(fam) + "0";
            const std::string other = fam + std::to_string(i);
            bool any = false;
            std::vector<std::string> row{base + "/" + other + "-1"};
            for (const auto& c : kColumns) {
                const auto* a = table.find(base, c.eval_set, c.task);
                const auto* b = table.find(other, c.eval_set, c.task);
                any = any || (a != nullptr && b != nullptr);
                row.push_back(ratio_cell(a, b, rel_ood_change));
            }
            if (any) t2.cells.push_back(std::move(row));
        }
    out += "\n";
    out += t2.render("Relative change from perturbed training data (clean-trained error / perturbed-trained error - 1)");

    TextTable t3;
    t3.cells.push_back({"", "single-task", "multi-task", "relative improvement"});
    for (const char* fam : {"MLP", "SDA"})
        for (const char* task : {"digits", "lower", "upper"}) {
            const auto* s = table.find(fam, "nist", task, "single");
            const auto* m = table.find(fam, "nist", task, "multi");
            if (s == nullptr && m == nullptr) continue;
            auto cell = [](const ResultRow* r) {
                if (r == nullptr) return std::string("n/a");
                return r->status == "ok" ? percent(r->error) : std::string("failed");
            };
            t3.cells.push_back({std::string(fam) + "-" + task, cell(s), cell(m),
                                ratio_cell(s, m, rel_multitask_improvement)});
        }
    out += "\n";
    out += t3.render("Multi-task setting on clean data (relative improvement = 1 - single-task error / multi-task error)");
    return out;
}

// --------------------------------------------------------------------- grid

SplitData make_grid_data(const ExperimentGrid& grid, DataSetId id) {
    const Preset preset = id == DataSetId::nist    ? Preset::raw
                          : id == DataSetId::nistp ? Preset::nistp
                                                   : Preset::p07;
    const SourceMix mix = id == DataSetId::nist ? SourceMix::single("nist") : SourceMix::parse(grid.mix);
    const std::size_t total = grid.n_train + grid.n_valid + grid.n_test;
    GenerateOptions opts;
    opts.threads = grid.threads;
    const auto all =
        generate_dataset(total, mix, PipelineSpec::preset(preset), data_seed(grid.seed, id), opts);
    const auto split = make_split(total, grid.n_train, grid.n_valid, grid.n_test);
    return {slice(all, split.train), slice(all, split.valid), slice(all, split.test)};
}

TrainedModel train_model(ModelFamily family, const LabeledDataset& train, const LabeledDataset& valid,
                         const LabeledDataset& select_on, int classes, const HyperParams& hyper,
                         std::uint64_t seed) {
    if (train.empty() || valid.empty() || select_on.empty())
        throw std::invalid_argument("train_model needs non-empty train, valid and selection sets");
    const auto x = nnet::to_matrix(train);
    const auto y = nnet::to_labels(train);
    const auto xv = nnet::to_matrix(valid);
    const auto yv = nnet::to_labels(valid);
    const auto xs = nnet::to_matrix(select_on);
    const auto ys = nnet::to_labels(select_on);

    nnet::TrainConfig cfg;
    cfg.minibatch = hyper.minibatch;
    cfg.epochs = hyper.epochs;
    cfg.pretrain_epochs = hyper.pretrain_epochs;
    cfg.seed = seed;

    TrainedModel best;
    best.kind = family == ModelFamily::mlp ? nnet::ModelKind::mlp : nnet::ModelKind::sda;
    bool have = false;
    auto consider = [&](nnet::Network net, double lr, double plr, const nnet::SdaModel* sda) {
        const double err = nnet::evaluate(net, xs, ys);
        if (!have || err < best.selection_error) {
            best.network = std::move(net);
            best.recon_biases.clear();
            if (sda != nullptr)
                for (const auto& layer : sda->layers) best.recon_biases.push_back(layer.recon_bias);
            best.learning_rate = lr;
            best.pretrain_learning_rate = plr;
            best.selection_error = err;
            have = true;
        }
    };

    if (family == ModelFamily::mlp) {
        for (double lr : hyper.learning_rates) {
            RngStream init(RngStream(seed).substream(0));
            auto net = nnet::make_mlp(x.rows(), hyper.hidden_units, classes, init);
            cfg.learning_rate = lr;
            nnet::finetune(net, x, y, xv, yv, cfg);
            consider(std::move(net), lr, 0.0, nullptr);
        }
        return best;
    }

    for (double plr : hyper.pretrain_learning_rates) {
        RngStream init(RngStream(seed).substream(0));
        auto sda = nnet::make_sda(x.rows(), hyper.sda_width, classes, hyper.corruption, hyper.tied, init);
        cfg.pretrain_learning_rate = plr;
        nnet::pretrain(sda, x, cfg);
        for (double lr : hyper.learning_rates) {
            auto copy = sda;
            cfg.learning_rate = lr;
            auto net = nnet::finetune(copy, x, y, xv, yv, cfg);
            consider(std::move(net), lr, plr, &copy);
        }
    }
    return best;
}

ResultTable run_grid(const ExperimentGrid& grid, const ProgressFn& progress) {
    auto say = [&](const std::string& msg) {
        if (progress) progress(msg);
    };

    std::vector<DataSetId> needed = grid.eval_sets;
    needed.insert(needed.end(), grid.train_sets.begin(), grid.train_sets.end());
    needed.push_back(DataSetId::nistp);  // model selection
    if (grid.single_task) needed.push_back(DataSetId::nist);
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());

    std::map<DataSetId, SplitData> data;
    for (auto id : needed) {
        say(fmt::format("generating {} ({} images)", to_string(id), grid.n_train + grid.n_valid + grid.n_test));
        data.emplace(id, make_grid_data(grid, id));
    }
    const auto& select_on = data.at(DataSetId::nistp).valid;

    ResultTable table;
    auto record = [&](ResultRow row, const nnet::Network* net, const LabeledDataset& test,
                      std::optional<ClassRange> subset) {
        if (net != nullptr && !test.empty()) {
            row.error = nnet::evaluate(*net, nnet::to_matrix(test), nnet::to_labels(test), subset);
            row.n = test.size();
            row.stderr_ = stderr_of_rate(row.error, row.n);
        } else {
            row.status = "failed";
            row.n = test.size();
        }
        table.rows.push_back(std::move(row));
    };

    for (auto family : grid.models) {
        for (auto train_id : grid.train_sets) {
            const auto name = model_name(family, train_id);
            const auto& d = data.at(train_id);
            say(fmt::format("training {} on {}", name, to_string(train_id)));
            std::optional<TrainedModel> model;
            try {
                model = train_model(family, d.train, d.valid, select_on, kClassCount, grid.hyper,
                                    model_seed(grid.seed, family, train_id, ClassSet::all));
            } catch (const nnet::TrainingDiverged& e) {
                say(fmt::format("{} diverged: {}", name, e.what()));
            }
            const nnet::Network* net = model ? &model->network : nullptr;
            for (auto eval_id : grid.eval_sets) {
                const auto& test = data.at(eval_id).test;
                for (auto task : grid.tasks) {
                    const auto subset = task == ClassSet::all ? std::nullopt
                                                              : std::optional<ClassRange>(class_range(task));
                    const auto filtered = task == ClassSet::all ? test : filter_classes(test, task, false);
                    ResultRow row{name, to_string(train_id), to_string(eval_id), to_string(task), "multi"};
                    record(row, net, filtered, subset);
                    // The multi-task comparison reuses the clean-trained model.
                    if (grid.single_task && train_id == DataSetId::nist && eval_id == DataSetId::nist &&
                        task != ClassSet::all) {
                        row.model = family_upper(family);
                        record(row, net, filtered, subset);
                    }
                }
            }
        }

        if (!grid.single_task) continue;
        const auto& clean = data.at(DataSetId::nist);
        for (auto task : {ClassSet::digits, ClassSet::lower, ClassSet::upper}) {
            if (std::find(grid.tasks.begin(), grid.tasks.end(), task) == grid.tasks.end()) continue;
            const auto name = family_upper(family);
            const auto train = filter_classes(clean.train, task, true);
            const auto valid = filter_classes(clean.valid, task, true);
            const auto test = filter_classes(clean.test, task, true);
            say(fmt::format("training single-task {} on {}", name, to_string(task)));
            std::optional<TrainedModel> model;
            try {
                if (!train.empty() && !valid.empty())
                    model = train_model(family, train, valid, valid, class_range(task).count, grid.hyper,
                                        model_seed(grid.seed, family, DataSetId::nist, task));
            } catch (const nnet::TrainingDiverged& e) {
                say(fmt::format("single-task {} diverged: {}", name, e.what()));
            }
            ResultRow row{name, "nist", "nist", to_string(task), "single"};
            record(row, model ? &model->network : nullptr, test, std::nullopt);
        }
    }
    return table;
}

}  // namespace glyphwarp
