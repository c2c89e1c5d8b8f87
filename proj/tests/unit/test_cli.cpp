#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include "assemai/detlog.hpp"
#include "assemai/ontology.hpp"
#include "helpers.hpp"

using namespace assemai;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const testutil::TempDir& dir, const std::string& env = "") {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = env + " '" + std::string(ASSEMAI_CLI_PATH) + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1, help exits 0") {
    testutil::TempDir dir("cli-usage");
    CHECK(cli("", dir).code == 1);
    const Run unknown = cli("frobnicate", dir);
    CHECK(unknown.code == 1);
    CHECK_FALSE(unknown.err.empty());
    CHECK(cli("gen --out x --bogus-flag 3", dir).code == 1);
    CHECK(cli("gen", dir).code == 1);  // --out is required
    const Run help = cli("--help", dir);
    CHECK(help.code == 0);
    for (const char* sub : {"gen", "preprocess", "train", "eval", "explain", "verify", "plc-serve", "gateway", "report"})
      CHECK(help.out.find(sub) != std::string::npos);
  }

  TEST_CASE("runtime errors exit 2") {
    testutil::TempDir dir("cli-runtime");
    const Run r = cli("eval --predictions '" + (dir / "missing.jsonl").string() + "' --out '" + dir.path().string() +
                          "/o'",
                      dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("error") != std::string::npos);
  }

  TEST_CASE("eval on a perfect-prediction fixture") {
    testutil::TempDir dir("cli-eval");
    std::string preds;
    for (int i = 0; i < 25; ++i) preds += "{\"label\": " + std::to_string(i % 5) + ", \"predicted\": " +
                                          std::to_string(i % 5) + "}\n";
    write(dir / "p.jsonl", preds);
    const Run r = cli("eval --predictions '" + (dir / "p.jsonl").string() + "' --out '" + (dir / "o").string() + "'", dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Accuracy") != std::string::npos);
    CHECK(r.out.find("100.00%") != std::string::npos);
    CHECK(r.out.find((dir / "o" / "metrics.json").string()) != std::string::npos);
    const auto j = nlohmann::json::parse(std::ifstream(dir / "o" / "metrics.json"));
    CHECK(j["accuracy"] == 1.0);
  }

  TEST_CASE("verify on a log with three injected violations") {
    testutil::TempDir dir("cli-verify");
    const OntologySpec spec = load_ontology(default_ontology_path());
    {
      LogWriter w(dir / "log.jsonl");
      auto rec = [&](int state, AnomalyClass c) {
        DetectionRecord r;
        r.cycle_state = CycleState(state);
        r.predicted_class = c;
        r.probs = {0.2, 0.2, 0.2, 0.2, 0.2};
        r.bbox = {0, 0, 4, 4};
        r.verdict = verify(r.cycle_state, c, spec);
        r.model_id = "fixture";
        w.append(r);
      };
      for (int i = 0; i < 7; ++i) rec(9, AnomalyClass::NoNose);
      for (int i = 0; i < 3; ++i) rec(4, AnomalyClass::NoNose);
      for (int i = 0; i < 5; ++i) rec(4, AnomalyClass::NoAnomaly);
    }
    const Run r = cli("verify --log '" + (dir / "log.jsonl").string() + "' --out '" + (dir / "o").string() + "'", dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("NoNose: 3 out of 10 inconsistent") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "o" / "audit.json"));

    const Run single = cli("verify --state 4 --class NoNose", dir);
    CHECK(single.code == 0);
    CHECK(single.out.find("nose-from-state-8") != std::string::npos);
  }

  TEST_CASE("json config and seed environment") {
    testutil::TempDir dir("cli-config");
    write(dir / "cfg.json", R"({"count": 12, "width": 64, "height": 64, "seed": 9})");
    const Run a = cli("gen --config '" + (dir / "cfg.json").string() + "' --out '" + (dir / "a").string() + "'", dir);
    REQUIRE(a.code == 0);
    const auto meta = nlohmann::json::parse(std::ifstream(dir / "a" / "manifest.meta.json"));
    CHECK(meta["seed"] == 9);
    std::ifstream m(dir / "a" / "manifest.jsonl");
    int lines = 0;
    for (std::string l; std::getline(m, l);) ++lines;
    CHECK(lines == 12);

    const Run b = cli("gen --count 6 --width 64 --height 64 --out '" + (dir / "b").string() + "'", dir, "ASSEMAI_SEED=17");
    REQUIRE(b.code == 0);
    CHECK(nlohmann::json::parse(std::ifstream(dir / "b" / "manifest.meta.json"))["seed"] == 17);
  }

  TEST_CASE("config schema lists exactly the documented options") {
    testutil::TempDir dir("cli-schema");
    const auto schema = nlohmann::json::parse(std::ifstream(ASSEMAI_SCHEMA_PATH));
    for (const auto& [sub, def] : schema["$defs"].items()) {
      const Run help = cli(sub + " --help", dir);
      REQUIRE(help.code == 0);
      for (const auto& [key, _] : def["properties"].items()) {
        INFO(sub, " --", key);
        CHECK(help.out.find("--" + key) != std::string::npos);
      }
      // every long option in the help text appears in the schema, apart from --help and --config
      std::istringstream lines(help.out);
      for (std::string l; std::getline(lines, l);) {
        const auto at = l.find("--");
        if (at == std::string::npos || l.find_first_not_of(' ') != at) continue;
        std::string name = l.substr(at + 2, l.find_first_of(" =,", at) - at - 2);
        if (name == "help" || name == "config") continue;
        INFO(sub, " --", name);
        CHECK(def["properties"].contains(name));
      }
    }
  }
}
