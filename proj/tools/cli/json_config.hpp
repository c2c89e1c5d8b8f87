#pragma once

// CLI11 config formatter for JSON files. Top-level keys are option long
// names without dashes; arrays give multi-valued options; nested objects
// address subcommands. With a scope set, top-level keys belong to that
// subcommand. A "seed" key is ignored while ASSEMAI_SEED is set.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace assemai::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? nlohmann::ordered_json(res.front()) : nlohmann::ordered_json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ParseError(std::string("config file is not valid JSON: ") + e.what(), CLI::ExitCodes::ConversionError);
    }
    if (!j.is_object()) throw CLI::ParseError("config file must hold a JSON object", CLI::ExitCodes::ConversionError);
    std::vector<CLI::ConfigItem> items;
    collect(j, scope_.empty() ? std::vector<std::string>{} : std::vector<std::string>{scope_}, items);
    const char* env = std::getenv("ASSEMAI_SEED");
    if (env != nullptr && *env != '\0') {
      std::erase_if(items, [](const CLI::ConfigItem& i) { return i.name == "seed"; });
    }
    return items;
  }

  void set_scope(std::string subcommand) { scope_ = std::move(subcommand); }

 private:
  std::string scope_;

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, v] : obj.items()) {
      if (v.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(v, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array()) {
        for (const auto& e : v) item.inputs.push_back(scalar(e));
      } else {
        item.inputs.push_back(scalar(v));
      }
      items.push_back(std::move(item));
    }
  }
};

}  // namespace assemai::cli
