// clab — command-line front end: data generation, golden network
// construction, MDL encoding, loss evaluation, training, grid search,
// loss-surface exploration and report generation.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clab/codec.hpp"
#include "clab/golden.hpp"
#include "clab/grammar.hpp"
#include "clab/lstm.hpp"
#include "clab/manifest.hpp"
#include "clab/objectives.hpp"
#include "clab/surface.hpp"
#include "clab/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path out_base() {
  if (const char* env = std::getenv("CLAB_OUT_DIR")) return fs::path(env);
  return fs::path(".");
}

fs::path resolve_out(const std::string& out) {
  fs::path p(out);
  return p.is_absolute() ? p : out_base() / p;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream o(file);
  if (!o) throw std::runtime_error("cannot open for writing: " + file.string());
  o << text;
  if (!o) throw std::runtime_error("write failed: " + file.string());
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    s += argv[i];
  }
  return s;
}

void require_file(const fs::path& file, const std::string& hint) {
  if (!fs::exists(file))
    throw std::runtime_error("missing " + file.string() + "; run `" + hint + "` first");
}

struct GenDataArgs {
  double p = 0.3;
  std::uint64_t seed = 1;
  int size = 1000;
  int test_min = 1, test_max = 1500;
  std::string out = "data";
};

int run_gen_data(const GenDataArgs& a, const std::string& cmdline) {
  Stopwatch watch;
  const fs::path dir = resolve_out(a.out);
  fs::create_directories(dir);
  const clab::SplitData split = clab::make_split({a.p, a.seed}, a.size, a.test_max);
  clab::Dataset test = split.test;
  if (a.test_min != 1) test = clab::build_test(a.test_min, a.test_max);

  clab::save_dataset(split.train, dir / "train.txt");
  clab::save_dataset(split.validation, dir / "validation.txt");
  clab::save_dataset(test, dir / "test.txt");

  clab::ExperimentManifest m;
  m.command = cmdline;
  m.seeds = {a.seed};
  json cfg{{"p", a.p},
           {"seed", a.seed},
           {"size", a.size},
           {"counts",
            {{"train", split.train.size()}, {"validation", split.validation.size()}, {"test", test.size()}}},
           {"max_n", clab::max_n(split.train)},
           {"test_range", {a.test_min, a.test_max}}};
  m.config_json = cfg.dump();
  m.add_output(dir / "train.txt");
  m.add_output(dir / "validation.txt");
  m.add_output(dir / "test.txt");
  m.wall_clock_sec = watch.seconds();
  clab::save_manifest(m, dir / "manifest.json");
  std::cout << "wrote " << (dir / "train.txt").string() << " (" << split.train.size() << " samples, max n "
            << clab::max_n(split.train) << "), validation (" << split.validation.size() << "), test (" << test.size()
            << ")\n";
  return 0;
}

std::string trace_csv(const clab::LstmParams& net, int n) {
  const std::vector<clab::Symbol> tokens = clab::StringSample{n}.tokens();
  const auto trace = clab::memory_trace(net, tokens);
  std::string csv = "t,input";
  for (int k = 0; k < net.hidden_size; ++k) csv += ",c" + std::to_string(k);
  csv += "\n";
  char buf[64];
  for (std::size_t t = 0; t < trace.size(); ++t) {
    csv += std::to_string(t);
    csv += ',';
    csv += clab::symbol_char(tokens[t]);
    for (double c : trace[t]) {
      const int len = std::snprintf(buf, sizeof buf, ",%.12g", c);
      csv.append(buf, len);
    }
    csv += '\n';
  }
  return csv;
}

std::string probabilities_csv(const clab::LstmParams& net, int n) {
  const std::vector<clab::Symbol> tokens = clab::StringSample{n}.tokens();
  const auto dists = clab::run_sequence(net, tokens);
  std::string csv = "t,input,target,p_hash,p_a,p_b\n";
  char buf[128];
  for (std::size_t t = 0; t + 1 < tokens.size(); ++t) {
    const int len =
        std::snprintf(buf, sizeof buf, "%zu,%c,%c,%.12g,%.12g,%.12g\n", t, clab::symbol_char(tokens[t]),
                      clab::symbol_char(tokens[t + 1]), dists[t][0], dists[t][1], dists[t][2]);
    csv.append(buf, len);
  }
  return csv;
}

std::string table_golden_csv(const clab::LstmParams& net, const clab::Dataset& train, const clab::Dataset& test) {
  const double test_acc = clab::deterministic_accuracy(net, test).per_position;
  std::string csv = "objective,lambda,loss,test_det_acc\n";
  char buf[128];
  const auto row = [&](const char* name, double lambda, double loss) {
    const int len = std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g\n", name, lambda, loss, test_acc);
    csv.append(buf, len);
  };
  row("ce", 0.0, clab::ce_mean(net, train));
  for (double lambda : {0.1, 0.5, 1.0})
    row("l1", lambda, clab::combined_loss(net, train, {clab::ObjectiveKind::CeL1, lambda}));
  for (double lambda : {0.1, 0.5, 1.0})
    row("l2", lambda, clab::combined_loss(net, train, {clab::ObjectiveKind::CeL2, lambda}));
  row("mdl", 0.0, clab::combined_loss(net, train, {clab::ObjectiveKind::Mdl}));
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clab: a desk-scale laboratory for MDL analysis of LSTM counter networks"};
  app.require_subcommand(1);
  const std::string cmdline = command_line(argc, argv);

  // ---- gen-data ----
  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Sample grammar datasets and write the train/val/test files");
  gen_cmd->add_option("--p", gen.p, "grammar stop probability")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  gen_cmd->add_option("--seed", gen.seed, "sampling seed");
  gen_cmd->add_option("--size", gen.size, "pre-split sample count (95%/5% train/validation)");
  gen_cmd->add_option("--test-min", gen.test_min, "smallest test n");
  gen_cmd->add_option("--test-max", gen.test_max, "largest test n");
  gen_cmd->add_option("--out", gen.out, "output directory");

  // ---- golden ----
  CLI::App* golden_cmd = app.add_subcommand("golden", "Golden a^n b^n network utilities");
  golden_cmd->require_subcommand(1);
  clab::GoldenConfig gcfg;
  std::string golden_out = "golden.json";
  CLI::App* golden_build = golden_cmd->add_subcommand("build", "Construct the golden network JSON");
  golden_build->add_option("--p", gcfg.p, "grammar stop probability");
  golden_build->add_option("--large", gcfg.large, "gate saturation constant");
  golden_build->add_option("--epsilon", gcfg.epsilon, "log-of-zero guard");
  golden_build->add_option("--out", golden_out, "output network file");

  std::string trace_net, trace_out = "trace.csv";
  int trace_n = 5;
  CLI::App* golden_trace = golden_cmd->add_subcommand("trace", "Memory-cell trace CSV over one string");
  golden_trace->add_option("--net", trace_net, "network file (defaults to the golden construction)");
  golden_trace->add_option("-n,--n", trace_n, "string size n")->check(CLI::NonNegativeNumber);
  golden_trace->add_option("--out", trace_out, "output CSV");

  // ---- encode ----
  std::string enc_net, enc_out;
  std::int64_t enc_max_den = 1000;
  CLI::App* enc_cmd = app.add_subcommand("encode", "MDL-encode a network; prints |H| in bits");
  enc_cmd->add_option("--net", enc_net, "network JSON file")->required();
  enc_cmd->add_option("--max-den", enc_max_den, "float->rational denominator bound");
  enc_cmd->add_option("--out", enc_out, "optional packed bitstream output");

  // ---- eval ----
  std::string eval_net, eval_data, eval_obj = "ce";
  double eval_lambda = 0.0;
  std::int64_t eval_max_den = 1000;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate an objective on a dataset; prints a LossReport JSON");
  eval_cmd->add_option("--net", eval_net, "network JSON file")->required();
  eval_cmd->add_option("--data", eval_data, "dataset file")->required();
  eval_cmd->add_option("--objective", eval_obj, "ce|l1|l2|mdl");
  eval_cmd->add_option("--lambda", eval_lambda, "regularization coefficient");
  eval_cmd->add_option("--max-den", eval_max_den, "denominator bound for |H|");

  // ---- train ----
  clab::TrainConfig tcfg;
  int train_patience = -1;
  std::string train_reg = "none", train_init = "normal", train_out = "run";
  int train_test_max = 1500;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one network with Adam + early stopping");
  train_cmd->add_option("--size", tcfg.train_size, "pre-split sample count");
  train_cmd->add_option("--seed", tcfg.seed, "run seed (data, init, dropout)");
  train_cmd->add_option("--reg", train_reg, "none|l1|l2");
  train_cmd->add_option("--lambda", tcfg.lambda, "regularization coefficient");
  train_cmd->add_option("--dropout", tcfg.dropout, "dropout rate on the output-layer input");
  train_cmd->add_option("--patience", train_patience, "early-stopping patience in epochs (-1 = none)");
  train_cmd->add_option("--init", train_init, "uniform|normal");
  train_cmd->add_option("--epochs", tcfg.epochs, "epoch cap");
  train_cmd->add_option("--lr", tcfg.lr, "Adam learning rate");
  train_cmd->add_option("--batch", tcfg.batch, "minibatch size (0 = full batch)");
  train_cmd->add_option("--hidden", tcfg.hidden_size, "hidden size");
  train_cmd->add_option("--p", tcfg.p, "grammar stop probability");
  train_cmd->add_option("--test-max", train_test_max, "largest test n");
  train_cmd->add_option("--out", train_out, "output directory");

  // ---- grid ----
  std::string grid_config, grid_out = "grid";
  int grid_jobs = 1;
  bool grid_plan_only = false;
  CLI::App* grid_cmd = app.add_subcommand("grid", "Hyper-parameter grid search from a JSON spec");
  grid_cmd->add_option("--config", grid_config, "grid spec JSON file")->required();
  grid_cmd->add_option("--jobs", grid_jobs, "parallel worker slots");
  grid_cmd->add_option("--out", grid_out, "output directory");
  grid_cmd->add_flag("--plan-only", grid_plan_only, "print the number of planned configurations and exit");

  // ---- explore ----
  std::string exp_net, exp_data, exp_test_data, exp_obj = "mdl", exp_out = "surface";
  double exp_lambda = 0.0, exp_range = 1.0;
  std::int64_t exp_max_den = 1000;
  std::vector<std::uint64_t> exp_seeds{7, 11};
  int exp_grid = 51, exp_jobs = 1;
  bool exp_no_bias_groups = false;
  CLI::App* exp_cmd = app.add_subcommand("explore", "2-D filter-normalized loss surface around a network");
  exp_cmd->add_option("--net", exp_net, "center network JSON file")->required();
  exp_cmd->add_option("--data", exp_data, "training dataset (loss surface)")->required();
  exp_cmd->add_option("--test-data", exp_test_data, "test dataset for accuracy probes (default: all n in [1,1500])");
  exp_cmd->add_option("--objective", exp_obj, "ce|l1|l2|mdl");
  exp_cmd->add_option("--lambda", exp_lambda, "regularization coefficient");
  exp_cmd->add_option("--max-den", exp_max_den, "denominator bound for |H|");
  exp_cmd->add_option("--seeds", exp_seeds, "direction seeds (two)")->expected(2)->delimiter(',');
  exp_cmd->add_option("--grid", exp_grid, "odd grid size");
  exp_cmd->add_option("--range", exp_range, "alpha/beta half-range");
  exp_cmd->add_flag("--no-bias-groups", exp_no_bias_groups, "exclude biases from filter normalization groups");
  exp_cmd->add_option("--jobs", exp_jobs, "parallel worker slots");
  exp_cmd->add_option("--out", exp_out, "output prefix (.csv and .json)");

  // ---- report ----
  std::string rep_kind, rep_net, rep_data, rep_out = "report";
  int rep_n = 73;
  std::vector<std::uint64_t> rep_seeds{7, 11};
  int rep_jobs = 1;
  CLI::App* rep_cmd = app.add_subcommand("report", "Emit reference tables and figure data as CSV");
  rep_cmd->add_option("--reproduce", rep_kind, "table1-golden|fig2|fig3|fig4")->required();
  rep_cmd->add_option("--net", rep_net, "network file (defaults to the golden construction)");
  rep_cmd->add_option("--data", rep_data, "training dataset file (table1-golden, fig2)");
  rep_cmd->add_option("-n,--n", rep_n, "string size for fig3/fig4");
  rep_cmd->add_option("--seeds", rep_seeds, "direction seeds for fig2")->expected(2)->delimiter(',');
  rep_cmd->add_option("--jobs", rep_jobs, "parallel worker slots");
  rep_cmd->add_option("--out", rep_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen_cmd) return run_gen_data(gen, cmdline);

    if (*golden_build) {
      Stopwatch watch;
      const fs::path out = resolve_out(golden_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      clab::save_network(clab::build_golden(gcfg), out);
      clab::ExperimentManifest m;
      m.command = cmdline;
      m.config_json = json{{"p", gcfg.p}, {"large", gcfg.large}, {"epsilon", gcfg.epsilon}}.dump();
      m.add_output(out);
      m.wall_clock_sec = watch.seconds();
      clab::save_manifest(m, out.string() + ".manifest.json");
      std::cout << "wrote " << out.string() << "\n";
      return 0;
    }

    if (*golden_trace) {
      const clab::LstmParams net = trace_net.empty() ? clab::build_golden() : clab::load_network(trace_net);
      const fs::path out = resolve_out(trace_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      write_text(out, trace_csv(net, trace_n));
      std::cout << "wrote " << out.string() << "\n";
      return 0;
    }

    if (*enc_cmd) {
      require_file(enc_net, "clab golden build --out " + enc_net);
      const clab::LstmParams net = clab::load_network(enc_net);
      const clab::BitString bits = clab::encode_network(net, enc_max_den);
      std::cout << bits.size() << "\n";
      if (!enc_out.empty()) {
        const fs::path out = resolve_out(enc_out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        clab::save_bitstream(bits, out);
        clab::ExperimentManifest m;
        m.command = cmdline;
        m.config_json = json{{"max_den", enc_max_den}, {"bits", bits.size()}}.dump();
        m.add_input(enc_net);
        m.add_output(out);
        clab::save_manifest(m, out.string() + ".manifest.json");
      }
      return 0;
    }

    if (*eval_cmd) {
      require_file(eval_net, "clab golden build --out " + eval_net);
      require_file(eval_data, "clab gen-data --out <dir>");
      clab::ObjectiveConfig cfg{clab::objective_from_string(eval_obj), eval_lambda, eval_max_den};
      const clab::LossReport report =
          clab::evaluate(clab::load_network(eval_net), clab::load_dataset(eval_data), cfg);
      std::cout << clab::loss_report_to_json(report);
      return 0;
    }

    if (*train_cmd) {
      Stopwatch watch;
      tcfg.reg = clab::reg_from_string(train_reg);
      tcfg.init = clab::init_from_string(train_init);
      tcfg.patience = train_patience >= 0 ? std::optional<int>(train_patience) : std::nullopt;
      const fs::path dir = resolve_out(train_out);
      fs::create_directories(dir);

      const clab::SplitData split = clab::make_split({tcfg.p, tcfg.seed}, tcfg.train_size, train_test_max);
      const clab::TrainResult r = clab::train(tcfg, split);

      clab::save_network(r.params, dir / "net.json");
      std::string hist = "epoch,train_loss,val_loss\n";
      char buf[96];
      for (std::size_t e = 0; e < r.history.size(); ++e) {
        const int len = std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", e + 1, r.history[e].train_loss,
                                      r.history[e].val_loss);
        hist.append(buf, len);
      }
      write_text(dir / "history.csv", hist);

      json summary{{"stopped_epoch", r.stopped_epoch},
                   {"best_epoch", r.best_epoch},
                   {"val_loss_best", r.val_loss_best},
                   {"val_det_acc", r.val_det_acc},
                   {"test_det_acc", r.test_det_acc},
                   {"diverged", r.diverged}};
      if (r.first_failure_n) summary["first_failure_n"] = *r.first_failure_n;
      std::cout << summary.dump(2) << "\n";

      clab::ExperimentManifest m;
      m.command = cmdline;
      m.seeds = {tcfg.seed};
      m.config_json = json{{"size", tcfg.train_size}, {"reg", train_reg},   {"lambda", tcfg.lambda},
                           {"dropout", tcfg.dropout}, {"init", train_init}, {"epochs", tcfg.epochs},
                           {"patience", train_patience}}
                          .dump();
      m.add_output(dir / "net.json");
      m.add_output(dir / "history.csv");
      m.wall_clock_sec = watch.seconds();
      clab::save_manifest(m, dir / "manifest.json");
      return 0;
    }

    if (*grid_cmd) {
      Stopwatch watch;
      require_file(grid_config, "write a grid spec JSON (see README)");
      std::ifstream in(grid_config);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const clab::GridSpec spec = clab::grid_spec_from_json(text);
      if (grid_plan_only) {
        std::cout << clab::expand_grid(spec).size() << "\n";
        return 0;
      }
      const fs::path dir = resolve_out(grid_out);
      fs::create_directories(dir);
      const std::vector<clab::GridRow> rows = clab::grid_search(spec, grid_jobs);
      write_text(dir / "grid.csv", clab::grid_csv(rows));
      char name[64];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].failed) continue;
        std::snprintf(name, sizeof name, "run_%03zu", i);
        clab::save_network(rows[i].result.params, dir / (std::string(name) + ".json"));
        std::string hist = "epoch,train_loss,val_loss\n";
        char buf[96];
        for (std::size_t e = 0; e < rows[i].result.history.size(); ++e) {
          const int len = std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", e + 1,
                                        rows[i].result.history[e].train_loss, rows[i].result.history[e].val_loss);
          hist.append(buf, len);
        }
        write_text(dir / (std::string(name) + "_history.csv"), hist);
      }
      clab::ExperimentManifest m;
      m.command = cmdline;
      m.config_json = text;
      for (const auto& row : rows) m.seeds.push_back(row.cfg.seed);
      m.add_input(grid_config);
      m.add_output(dir / "grid.csv");
      m.wall_clock_sec = watch.seconds();
      clab::save_manifest(m, dir / "manifest.json");
      std::cout << "wrote " << (dir / "grid.csv").string() << " (" << rows.size() << " rows)\n";
      return 0;
    }

    if (*exp_cmd) {
      Stopwatch watch;
      require_file(exp_net, "clab golden build --out " + exp_net);
      require_file(exp_data, "clab gen-data --out <dir>");
      const clab::LstmParams net = clab::load_network(exp_net);
      const clab::Dataset train = clab::load_dataset(exp_data);
      const clab::Dataset test = exp_test_data.empty() ? clab::build_test(1, 1500) : clab::load_dataset(exp_test_data);
      clab::ObjectiveConfig obj{clab::objective_from_string(exp_obj), exp_lambda, exp_max_den};
      clab::SurfaceOptions opt;
      opt.grid = exp_grid;
      opt.range = exp_range;
      opt.bias_in_groups = !exp_no_bias_groups;
      opt.jobs = exp_jobs;
      const clab::Surface s = clab::explore(net, obj, train, test, exp_seeds[0], exp_seeds[1], opt);

      const fs::path prefix = resolve_out(exp_out);
      if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
      const fs::path csv = prefix.string() + ".csv";
      const fs::path summary = prefix.string() + ".json";
      clab::save_surface_csv(s, csv);
      clab::save_surface_summary(s, summary);

      clab::ExperimentManifest m;
      m.command = cmdline;
      m.seeds = {exp_seeds[0], exp_seeds[1]};
      m.config_json = json{{"objective", exp_obj}, {"lambda", exp_lambda},      {"grid", exp_grid},
                           {"range", exp_range},   {"max_den", exp_max_den},    {"bias_in_groups", opt.bias_in_groups}}
                          .dump();
      m.add_input(exp_net);
      m.add_input(exp_data);
      m.add_output(csv);
      m.add_output(summary);
      m.wall_clock_sec = watch.seconds();
      clab::save_manifest(m, prefix.string() + ".manifest.json");
      std::cout << clab::surface_summary_json(s);
      return 0;
    }

    if (*rep_cmd) {
      Stopwatch watch;
      const fs::path dir = resolve_out(rep_out);
      fs::create_directories(dir);
      const clab::LstmParams net = rep_net.empty() ? clab::build_golden() : clab::load_network(rep_net);
      clab::ExperimentManifest m;
      m.command = cmdline;
      m.config_json = json{{"kind", rep_kind}, {"n", rep_n}}.dump();
      if (!rep_net.empty()) m.add_input(rep_net);

      if (rep_kind == "fig3") {
        write_text(dir / "fig3_probabilities.csv", probabilities_csv(net, rep_n));
        m.add_output(dir / "fig3_probabilities.csv");
      } else if (rep_kind == "fig4") {
        write_text(dir / "fig4_memory.csv", trace_csv(net, rep_n));
        m.add_output(dir / "fig4_memory.csv");
      } else if (rep_kind == "table1-golden") {
        require_file(rep_data, "clab gen-data --out <dir> (then pass --data <dir>/train.txt)");
        const clab::Dataset train = clab::load_dataset(rep_data);
        write_text(dir / "table1_golden.csv", table_golden_csv(net, train, clab::build_test(1, 1500)));
        m.add_input(rep_data);
        m.add_output(dir / "table1_golden.csv");
      } else if (rep_kind == "fig2") {
        require_file(rep_data, "clab gen-data --out <dir> (then pass --data <dir>/train.txt)");
        const clab::Dataset train = clab::load_dataset(rep_data);
        const clab::Dataset test = clab::build_test(1, 1500);
        clab::SurfaceOptions opt;
        opt.jobs = rep_jobs;
        const struct {
          const char* name;
          clab::ObjectiveConfig obj;
        } kinds[] = {{"l1", {clab::ObjectiveKind::CeL1, 0.1}},
                     {"l2", {clab::ObjectiveKind::CeL2, 0.1}},
                     {"mdl", {clab::ObjectiveKind::Mdl, 0.0}}};
        for (const auto& k : kinds) {
          const clab::Surface s = clab::explore(net, k.obj, train, test, rep_seeds[0], rep_seeds[1], opt);
          const fs::path csv = dir / (std::string("fig2_") + k.name + ".csv");
          const fs::path summary = dir / (std::string("fig2_") + k.name + ".json");
          clab::save_surface_csv(s, csv);
          clab::save_surface_summary(s, summary);
          m.add_output(csv);
          m.add_output(summary);
        }
        m.seeds = {rep_seeds[0], rep_seeds[1]};
        m.add_input(rep_data);
      } else {
        throw std::runtime_error("unknown report kind: " + rep_kind +
                                 " (expected table1-golden, fig2, fig3 or fig4)");
      }
      m.wall_clock_sec = watch.seconds();
      clab::save_manifest(m, dir / ("manifest_" + rep_kind + ".json"));
      std::cout << "wrote report files under " << dir.string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
