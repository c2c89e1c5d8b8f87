#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <memory>

#include "assemai/core.hpp"
#include "commands.hpp"
#include "json_config.hpp"

using namespace assemai::cli;

namespace {

// --seed (with ASSEMAI_SEED fallback), --config and --out on every subcommand.
void add_common(CLI::App* sub, std::uint64_t& seed, std::string& out, bool out_required) {
  sub->add_option("--seed", seed, "Random seed")->envname("ASSEMAI_SEED")->capture_default_str();
  // Placeholder for help output; hoist_config moves the value to the root app.
  sub->add_option("--config", "JSON file with option values keyed by long name (schema: tools/schema/cli_config.schema.json)")->type_name("FILE");
  auto* o = sub->add_option("--out", out, "Output directory");
  if (out_required) o->required();
}

// CLI11 reads config files only on the root app. Move a subcommand's
// --config there and scope the file's keys to that subcommand.
std::vector<std::string> hoist_config(int argc, char** argv, const CLI::App& app, JsonConfig& fmt) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t sub = 0;
  while (sub < args.size() && app.get_subcommand_no_throw(args[sub]) == nullptr) ++sub;
  if (sub == args.size()) return args;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    std::string path;
    std::size_t take = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      take = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      take = 1;
    }
    if (take == 0) continue;
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + take));
    args.insert(args.begin(), {"--config", path});
    fmt.set_scope(args[sub + 2]);
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assembly-line visual anomaly detection toolkit"};
  auto config = std::make_shared<JsonConfig>();
  app.config_formatter(config);
  app.set_config("--config")->group("");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Render a synthetic labelled corpus");
  add_common(g, gen.seed, gen.out, true);
  g->add_option("--count", gen.count, "Number of frames")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--width", gen.width, "Frame width")->capture_default_str();
  g->add_option("--height", gen.height, "Frame height")->capture_default_str();
  g->add_option("--noise", gen.noise, "Gaussian noise sigma")->capture_default_str();
  g->add_option("--clutter", gen.clutter, "Distractor shapes per frame")->capture_default_str();
  g->add_option("--period-ms", gen.period_ms, "Cycle period (21 equal state windows)")->capture_default_str();

  PreprocessOptions pre;
  auto* p = app.add_subcommand("preprocess", "Filter to states, screen with SSIM and crop regions of interest");
  add_common(p, pre.seed, pre.out, true);
  p->add_option("--in", pre.in, "Input manifest (directory or manifest.jsonl)")->required();
  p->add_option("--states", pre.states, "Cycle states to keep")->capture_default_str()->delimiter(',');
  p->add_option("--state9-window", pre.state9_window, "Retained fraction [a,b) of the state 9 window")
      ->expected(2)
      ->delimiter(',')
      ->capture_default_str();
  p->add_option("--period-ms", pre.period_ms, "Cycle period used by gen")->capture_default_str();
  p->add_option("--roi", pre.roi, "detect | fixed | none")->capture_default_str()->check(
      CLI::IsMember({"detect", "fixed", "none"}));
  p->add_option("--geometry", pre.geometry, "Crop geometry JSON (default table when omitted)");
  p->add_option("--ssim-window", pre.ssim_window, "SSIM window size (odd)")->capture_default_str();
  p->add_option("--ssim-limit", pre.ssim_limit, "Max SSIM comparisons per state and class")->capture_default_str();

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train the CNN with class-weighted loss");
  add_common(t, tr.seed, tr.out, true);
  t->add_option("--manifest", tr.manifest, "Training corpus manifest")->required();
  t->add_option("--roi", tr.roi, "detect | fixed | none")->capture_default_str()->check(
      CLI::IsMember({"detect", "fixed", "none"}));
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--batch", tr.batch)->capture_default_str();
  t->add_option("--lr", tr.lr)->capture_default_str();
  t->add_option("--input", tr.input, "Square model input size")->capture_default_str();
  t->add_option("--split", tr.split, "Train fraction of the stratified split")->capture_default_str();
  t->add_option("--channels", tr.channels)->capture_default_str()->check(CLI::IsMember({1, 3}));
  t->add_option("--conv1", tr.conv1, "conv1 filters")->capture_default_str();
  t->add_option("--conv2", tr.conv2, "conv2 filters")->capture_default_str();
  t->add_option("--dense", tr.dense, "Hidden dense width")->capture_default_str();

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Per-class and weighted precision/recall/F1 report");
  add_common(e, ev.seed, ev.out, true);
  auto* em = e->add_option("--model", ev.model, "Model container");
  auto* emf = e->add_option("--manifest", ev.manifest, "Evaluation manifest");
  auto* ep = e->add_option("--predictions", ev.predictions, "JSONL of {label, predicted} instead of a model");
  em->needs(emf);
  ep->excludes(em)->excludes(emf);
  e->add_option("--ontology", ev.ontology, "Ontology for the offline detection log (shipped default when omitted)");
  e->add_option("--roi", ev.roi, "detect | fixed | none")->capture_default_str()->check(
      CLI::IsMember({"detect", "fixed", "none"}));

  ExplainOptions ex;
  auto* x = app.add_subcommand("explain", "Score-CAM heatmaps and in-box saliency fractions");
  add_common(x, ex.seed, ex.out, true);
  x->add_option("--model", ex.model)->required();
  x->add_option("--manifest", ex.manifest)->required();
  x->add_option("--roi", ex.roi, "detect | fixed | none")->capture_default_str()->check(
      CLI::IsMember({"detect", "fixed", "none"}));
  x->add_option("--layer", ex.layer)->capture_default_str()->check(CLI::IsMember({"conv1", "conv2"}));
  x->add_option("--limit", ex.limit, "Images to explain")->capture_default_str();
  x->add_option("--heatmaps", ex.heatmaps, "Heatmap images to write")->capture_default_str();
  x->add_flag("--all", ex.all, "Include misclassified images");

  VerifyOptions ve;
  auto* v = app.add_subcommand("verify", "Audit a detection log against the ontology");
  add_common(v, ve.seed, ve.out, false);
  auto* vl = v->add_option("--log", ve.log, "Detection log (JSON Lines)");
  v->add_option("--ontology", ve.ontology, "Ontology JSON (shipped default when omitted)");
  auto* vs = v->add_option("--state", ve.state, "Single check: cycle state")->check(CLI::Range(1, 21));
  auto* vc = v->add_option("--class", ve.cls, "Single check: anomaly class name");
  vs->needs(vc);
  vc->needs(vs);
  vl->excludes(vs);

  PlcServeOptions ps;
  auto* s = app.add_subcommand("plc-serve", "Simulated PLC serving the cycle_state tag (FFTAG/1)");
  add_common(s, ps.seed, ps.out, false);
  s->add_option("--bind", ps.bind)->capture_default_str();
  s->add_option("--port", ps.port)->capture_default_str()->check(CLI::Range(0, 65535));
  s->add_option("--period-ms", ps.period_ms)->capture_default_str();
  s->add_option("--duration-ms", ps.duration_ms, "Stop after this long (0 = until signalled)")
      ->capture_default_str();

  GatewayOptions gw;
  auto* w = app.add_subcommand("gateway", "Edge-triggered capture, classification and verification");
  add_common(w, gw.seed, gw.out, true);
  w->add_option("--model", gw.model)->required();
  w->add_option("--ontology", gw.ontology);
  w->add_option("--plc-host", gw.plc_host)->capture_default_str();
  w->add_option("--plc-port", gw.plc_port)->capture_default_str()->check(CLI::Range(1, 65535));
  w->add_option("--cycles", gw.cycles, "Stop after this many cycles (0 = until signalled)")->capture_default_str();
  w->add_option("--poll-ms", gw.poll_ms)->capture_default_str();
  w->add_option("--backoff-ms", gw.backoff_ms)->capture_default_str();
  w->add_option("--backoff-max-ms", gw.backoff_max_ms)->capture_default_str();
  w->add_option("--retry-budget", gw.retry_budget)->capture_default_str();
  w->add_option("--roi", gw.roi)->capture_default_str()->check(CLI::IsMember({"detect", "fixed", "none"}));
  w->add_option("--width", gw.width, "Synthetic frame width")->capture_default_str();
  w->add_option("--height", gw.height, "Synthetic frame height")->capture_default_str();
  w->add_option("--noise", gw.noise)->capture_default_str();
  w->add_option("--clutter", gw.clutter)->capture_default_str();

  ReportOptions rp;
  auto* r = app.add_subcommand("report", "Aggregate run artifacts into one summary");
  add_common(r, rp.seed, rp.out, true);
  r->add_option("--runs", rp.runs, "Run directories to scan")->required();

  try {
    std::vector<std::string> args = hoist_config(argc, argv, app, *config);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*g) return run_gen(gen);
    if (*p) return run_preprocess(pre);
    if (*t) return run_train(tr);
    if (*e) {
      if (ev.model.empty() && ev.predictions.empty()) {
        std::cerr << "eval: give --model with --manifest, or --predictions\n";
        return 1;
      }
      return run_eval(ev);
    }
    if (*x) return run_explain(ex);
    if (*v) {
      if (ve.log.empty() && ve.cls.empty()) {
        std::cerr << "verify: give --log, or --state with --class\n";
        return 1;
      }
      return run_verify(ve);
    }
    if (*s) return run_plc_serve(ps);
    if (*w) return run_gateway_cmd(gw);
    if (*r) return run_report(rp);
  } catch (const std::exception& ex_) {
    std::cerr << "error: " << ex_.what() << "\n";
    return 2;
  }
  return 1;
}
