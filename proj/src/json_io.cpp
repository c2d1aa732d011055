#include "bevalkit/json_io.hpp"

#include <stdexcept>

namespace bevalkit {

using nlohmann::json;

json to_json(const EvalParams& p) {
  return {{"flags", p.to_flag_string()}, {"maxint", p.maxint},   {"minint", p.minint},
          {"timeout_ms", p.timeout_ms},  {"init", p.init},       {"kodkod", p.kodkod},
          {"smt", p.smt},                {"clpfd", p.clpfd}};
}

EvalParams params_from_json(const json& j) {
  if (j.is_null()) return EvalParams{};
  if (j.is_string()) return EvalParams::from_flag_string(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("params must be a flag string or an object");
  EvalParams p;
  try {
    if (auto it = j.find("flags"); it != j.end()) p = EvalParams::from_flag_string(it->get<std::string>());
    if (auto it = j.find("maxint"); it != j.end()) p.maxint = it->get<std::int64_t>();
    if (auto it = j.find("minint"); it != j.end()) p.minint = it->get<std::int64_t>();
    if (auto it = j.find("timeout_ms"); it != j.end()) p.timeout_ms = it->get<std::int64_t>();
    if (auto it = j.find("init"); it != j.end()) p.init = it->get<bool>();
    if (auto it = j.find("kodkod"); it != j.end()) p.kodkod = it->get<bool>();
    if (auto it = j.find("smt"); it != j.end()) p.smt = it->get<bool>();
    if (auto it = j.find("clpfd"); it != j.end()) p.clpfd = it->get<bool>();
  } catch (const json::exception& err) {
    throw std::invalid_argument(std::string("bad params: ") + err.what());
  }
  p.validate();
  return p;
}

json to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return v.as_int();
    case Value::Kind::Bool: return v.as_bool();
    default: return v.to_string();
  }
}

json to_json(const EvalResult& r) {
  json out = {{"verdict", to_string(r.verdict)}, {"elapsed_ms", r.elapsed_ms}};
  if (r.reason) {
    out["reason"] = to_string(*r.reason);
    out["detail"] = r.detail;
  }
  if (r.counterexample) {
    json ce = json::array();
    for (const auto& b : *r.counterexample) ce.push_back({{"name", b.name}, {"value", b.value.to_string()}});
    out["counterexample"] = std::move(ce);
  }
  return out;
}

json to_json(const ProofObligation& po) {
  json hyps = json::array();
  for (const auto& h : po.hypotheses) hyps.push_back(render(h));
  json out = {{"name", po.name},
              {"group", to_string(po.group)},
              {"hypotheses", std::move(hyps)},
              {"goal", render(po.goal)},
              {"status", to_string(po.status)}};
  out["provenance"] = po.provenance ? json(*po.provenance) : json(nullptr);
  return out;
}

json to_json(const GroupCounts& g) {
  return {{"total", g.total}, {"f1", g.f1}, {"f123", g.f123}, {"f123_beval", g.f123_beval},
          {"gain", g.gain()}};
}

json to_json(const PipelineReport& r) {
  json outcomes = json::array();
  for (const auto& o : r.outcomes) {
    json item = {{"name", o.name}, {"group", to_string(o.group)}, {"status", to_string(o.status)}};
    item["rule"] = o.rule ? json(*o.rule) : json(nullptr);
    if (o.evaluation) item["evaluation"] = to_json(*o.evaluation);
    outcomes.push_back(std::move(item));
  }
  return {{"component", r.component},
          {"common", to_json(r.common)},
          {"wd", to_json(r.wd)},
          {"outcomes", std::move(outcomes)},
          {"emitted_rules", r.emitted_rules}};
}

}  // namespace bevalkit
