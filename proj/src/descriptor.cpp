#include "nads/descriptor.hpp"

#include <fstream>

namespace nads {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("descriptor is missing \"") + key + "\"");
  return j.at(key);
}

std::size_t index_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw InvalidInput(std::string("\"") + key + "\" must be a positive integer");
  return v.get<std::size_t>();
}

RulePtr rule_from_json(const json& r, Surjectivity& policy, bool policy_given) {
  std::string kind = field(r, "kind").get<std::string>();
  if (kind == "constant") return std::make_shared<ConstantRule>(plmap_from_json(field(r, "map")));
  if (kind == "list_then_constant") {
    std::vector<PLMap> head;
    const json& maps = field(r, "maps");
    if (!maps.is_array()) throw InvalidInput("\"maps\" must be an array");
    for (const auto& m : maps) head.push_back(plmap_from_json(m));
    return std::make_shared<ListThenConstantRule>(std::move(head), plmap_from_json(field(r, "tail")));
  }
  if (kind == "figure1") {
    Figure1Params p;
    if (r.contains("height")) p.height = rational_from_json(r.at("height"));
    return std::make_shared<Figure1Rule>(p);
  }
  if (kind == "flat_tent") {
    std::vector<Rational> sched;
    const json& s = field(r, "schedule");
    if (!s.is_array()) throw InvalidInput("\"schedule\" must be an array");
    for (const auto& u : s) sched.push_back(rational_from_json(u));
    if (!policy_given) policy = Surjectivity::warn;
    return std::make_shared<FlatTentRule>(std::move(sched));
  }
  if (kind == "shrink") return std::make_shared<ShrinkRule>(interval_system_from_json(field(r, "base")), index_field(r, "N"));
  if (kind == "dc1_window")
    return std::make_shared<WindowSpliceRule>(interval_system_from_json(field(r, "base")),
                                              rational_from_json(field(r, "eps")));
  if (kind == "tail_splice")
    return std::make_shared<TailSpliceRule>(interval_system_from_json(field(r, "base")),
                                            plmap_from_json(field(r, "tail")), index_field(r, "N0"));
  throw InvalidInput("unknown rule kind: " + kind);
}

AnySystem parse(const json& j) {
  if (!j.is_object()) throw InvalidInput("descriptor must be a JSON object");
  const json& r = field(j, "rule");
  std::string space = j.value("space", std::string("interval"));
  bool policy_given = j.contains("surjectivity");
  Surjectivity policy =
      policy_given ? surjectivity_from_string(j.at("surjectivity").get<std::string>()) : Surjectivity::require;

  if (space == "cantor") {
    if (field(r, "kind").get<std::string>() != "odometer") throw InvalidInput("cantor space supports only odometer");
    std::size_t depth = r.contains("depth") ? index_field(r, "depth") : 64;
    return odometer_system(depth);
  }
  if (space != "interval") throw InvalidInput("space must be interval or cantor, got " + space);
  if (field(r, "kind").get<std::string>() == "odometer") throw InvalidInput("odometer requires space cantor");

  RulePtr rule = rule_from_json(r, policy, policy_given);
  if (j.contains("limit") && !j.at("limit").is_null()) return System(rule, plmap_from_json(j.at("limit")), policy);
  return System(rule, policy);
}

}  // namespace

AnySystem system_from_json(const json& j) {
  try {
    return parse(j);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed descriptor: ") + e.what());
  }
}

System interval_system_from_json(const json& j) {
  auto s = system_from_json(j);
  if (auto* sys = std::get_if<System>(&s)) return *sys;
  throw InvalidInput("expected an interval system descriptor");
}

json to_json(const AnySystem& s) {
  return std::visit([](const auto& v) { return nads::to_json(v); }, s);
}

AnySystem load_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open descriptor: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("descriptor " + path + " is not valid JSON: " + e.what());
  }
  return system_from_json(j);
}

}  // namespace nads
