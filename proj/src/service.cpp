#include "bevalkit/service.hpp"

#include <algorithm>

#include <httplib.h>

#include "bevalkit/json_io.hpp"
#include "bevalkit/pipeline.hpp"

namespace bevalkit {

using nlohmann::json;

ApiError current_api_error() {
  try {
    throw;
  } catch (const ApiError& err) {
    return err;
  } catch (const ParseError& err) {
    return ApiError(422, "parse_error", err.what(), err.line(), err.column());
  } catch (const std::out_of_range& err) {
    return ApiError(404, "not_found", err.what());
  } catch (const std::invalid_argument& err) {
    return ApiError(422, "invalid_request", err.what());
  } catch (const json::exception& err) {
    return ApiError(422, "invalid_request", err.what());
  } catch (const std::exception& err) {
    return ApiError(500, "internal", err.what());
  } catch (...) {
    return ApiError(500, "internal", "unknown failure");
  }
}

json error_json(const ApiError& err) {
  json e = {{"code", err.code()}, {"message", err.what()}};
  if (err.line() > 0) {
    e["line"] = err.line();
    e["column"] = err.column();
  }
  return {{"error", std::move(e)}};
}

// ---------------------------------------------------------------------------
// Workspace

Workspace::Workspace(std::filesystem::path root, std::chrono::milliseconds lock_wait)
    : root_(std::move(root)), lock_wait_(lock_wait) {}

std::map<std::string, std::filesystem::path> Workspace::scan() const {
  std::map<std::string, std::filesystem::path> out;
  if (!std::filesystem::is_directory(root_)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".pos") continue;
    try {
      Component c = import_component(read_file(entry.path()));
      out.emplace(c.name, entry.path());
    } catch (const std::exception&) {
      // Unreadable files are not components.
    }
  }
  return out;
}

Component Workspace::load(const std::string& name) const {
  auto files = scan();
  auto it = files.find(name);
  if (it == files.end()) throw ApiError(404, "not_found", "unknown component " + name);
  return load_component(it->second);
}

std::timed_mutex& Workspace::lock_for(const std::string& name) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[name];
  if (!slot) slot = std::make_unique<std::timed_mutex>();
  return *slot;
}

// ---------------------------------------------------------------------------
// Evaluation requests

namespace {

const ProofObligation* linked_po(const Component& c, const EvalRequest& request, const Expr& goal,
                                 const std::vector<Expr>& hyps) {
  if (request.po) {
    const ProofObligation* po = c.find(*request.po);
    if (!po) throw ApiError(404, "not_found", "unknown proof obligation " + *request.po);
    return po;
  }
  const ProofObligation* same_goal = nullptr;
  for (const auto& po : c.pos) {
    if (!(po.goal == goal)) continue;
    if (po.hypotheses == hyps) return &po;
    if (!same_goal) same_goal = &po;
  }
  return same_goal;
}

}  // namespace

EvalResponse evaluate(const EvalRequest& request, Component* component, const Clock& clock) {
  request.params.validate();
  if (request.add_rule && !component)
    throw std::invalid_argument("add_rule needs a component");

  const ProofObligation* named = nullptr;
  if (request.po) {
    if (!component) throw std::invalid_argument("po needs a component");
    named = component->find(*request.po);
    if (!named) throw ApiError(404, "not_found", "unknown proof obligation " + *request.po);
  }
  std::vector<Expr> hyps;
  Expr goal;
  if (request.goal) {
    for (const auto& h : request.hypotheses) hyps.push_back(parse_predicate(h));
    goal = parse_predicate(*request.goal);
  } else if (named) {
    hyps = named->hypotheses;
    goal = named->goal;
  } else {
    throw std::invalid_argument("request needs a goal or a proof obligation");
  }

  ProofObligation target;
  target.name = named ? named->name : "Goal";
  target.hypotheses = hyps;
  target.goal = goal;
  static const DefinitionTable kNoDefinitions;
  const DefinitionTable& defs = component ? component->definitions : kNoDefinitions;

  EvalResponse response;
  response.params = request.params;
  response.result = check_po(target, request.params, defs);
  if (!request.add_rule) return response;

  RuleOutcome& rule = response.rule.emplace();
  if (response.result.verdict != Verdict::True) {
    rule.message = "not added: verdict is " + std::string(to_string(response.result.verdict));
    return response;
  }
  const ProofObligation* po = linked_po(*component, request, goal, hyps);
  if (!po)
    throw ApiError(422, "no_matching_po",
                   "no proof obligation of " + component->name + " has this goal; name one with po");
  target.name = po->name;
  target.group = po->group;
  Rule r = make_rule(target, response.result, clock, component->module_path, std::nullopt,
                     &component->definitions);
  r.wd = request.wd;
  Rule stored = component->append_rule(std::move(r));
  component->set_status(po->name, PoStatus::ProvedBEval, stored.theory_name,
                        "evaluated TRUE with " + request.params.to_flag_string());
  rule.added = true;
  rule.theory_name = stored.theory_name;
  rule.file = component->name + (stored.wd ? "_wd.pmm" : ".pmm");
  rule.message = "added";
  return response;
}

EvalRequest eval_request_from_json(const json& body) {
  if (!body.is_object()) throw std::invalid_argument("request body must be a JSON object");
  EvalRequest r;
  if (auto it = body.find("component"); it != body.end() && !it->is_null()) r.component = it->get<std::string>();
  if (auto it = body.find("po"); it != body.end() && !it->is_null()) r.po = it->get<std::string>();
  if (auto it = body.find("goal"); it != body.end() && !it->is_null()) r.goal = it->get<std::string>();
  if (auto it = body.find("hypotheses"); it != body.end() && !it->is_null())
    r.hypotheses = it->get<std::vector<std::string>>();
  if (auto it = body.find("params"); it != body.end()) r.params = params_from_json(*it);
  r.add_rule = body.value("add_rule", false);
  r.wd = body.value("wd", false);
  return r;
}

json to_json(const EvalResponse& r) {
  json out = to_json(r.result);
  out["params"] = to_json(r.params);
  if (r.rule) {
    out["rule"] = {{"added", r.rule->added}, {"message", r.rule->message}};
    if (r.rule->added) {
      out["rule"]["theory_name"] = r.rule->theory_name;
      out["rule"]["file"] = r.rule->file;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Service

Service::Service(ServiceConfig config)
    : config_(std::move(config)), workspace_(config_.workspace, config_.lock_wait) {}

EvalParams Service::capped(EvalParams p) const {
  p.timeout_ms = std::min(p.timeout_ms, config_.timeout_cap_ms);
  return p;
}

json Service::components() {
  json list = json::array();
  for (const auto& [name, path] : workspace_.scan()) {
    Component c = load_component(path);
    const auto unproved = c.list(PoFilter::Unproved).size();
    list.push_back({{"name", c.name},
                    {"module_path", c.module_path},
                    {"file", path.filename().string()},
                    {"pos", c.pos.size()},
                    {"unproved", unproved}});
  }
  return {{"components", std::move(list)}};
}

json Service::pos(const std::string& component, const std::string& filter_text) {
  auto filter = parse_filter(filter_text.empty() ? "unproved" : filter_text);
  if (!filter) throw std::invalid_argument("filter must be unproved, proved or all");
  Component c = workspace_.load(component);
  json list = json::array();
  for (const auto& po : c.list(*filter)) list.push_back(to_json(po));
  return {{"component", c.name}, {"filter", filter_text.empty() ? "unproved" : filter_text},
          {"pos", std::move(list)}};
}

json Service::eval(const json& body) {
  EvalRequest request = eval_request_from_json(body);
  request.params = capped(request.params);
  if (!request.component) return to_json(evaluate(request, nullptr, config_.clock));
  if (!request.add_rule) {
    Component c = workspace_.load(*request.component);
    return to_json(evaluate(request, &c, config_.clock));
  }
  return workspace_.mutate(*request.component, [&](Component& c) {
    return to_json(evaluate(request, &c, config_.clock));
  });
}

json Service::pipeline(const std::string& component, const json& body) {
  PipelineOptions options;
  options.clock = config_.clock;
  if (!body.is_null() && !body.is_object()) throw std::invalid_argument("request body must be a JSON object");
  if (body.is_object()) {
    if (auto it = body.find("params"); it != body.end()) options.params = params_from_json(*it);
    options.emit_rules = body.value("emit_rules", false);
  }
  options.params = capped(options.params);
  return workspace_.mutate(component, [&](Component& c) {
    PipelineReport report = run_pipeline(c, options);
    json out = to_json(report);
    out["params"] = to_json(options.params);
    out["table"] = render_report(std::span<const PipelineReport>(&report, 1));
    return out;
  });
}

json Service::file_text(const std::string& component, const std::string& which) {
  Component c = workspace_.load(component);
  const std::string* text = which == "pmm"         ? &c.pmm_text
                            : which == "wd_pmm"    ? &c.wd_pmm_text
                            : which == "user_pass" ? &c.user_pass_text
                                                   : nullptr;
  if (!text) throw ApiError(404, "not_found", "unknown file " + which);
  return {{"component", c.name}, {"file", which}, {"text", *text}};
}

// ---------------------------------------------------------------------------
// HTTP

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}
  Service& service;
  httplib::Server server;
};

namespace {

template <class Fn>
void respond(httplib::Response& res, Fn&& fn) {
  try {
    json body = fn();
    res.status = 200;
    res.set_content(body.dump(2), "application/json");
  } catch (...) {
    ApiError err = current_api_error();
    res.status = err.status();
    res.set_content(error_json(err).dump(2), "application/json");
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& err) {
    throw ApiError(422, "invalid_json", err.what());
  }
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& s = impl_->server;
  Service& svc = impl_->service;
  s.Get("/api/components", [&svc](const httplib::Request&, httplib::Response& res) {
    respond(res, [&] { return svc.components(); });
  });
  s.Get(R"(/api/components/([^/]+)/pos)", [&svc](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] {
      return svc.pos(req.matches[1], req.has_param("filter") ? req.get_param_value("filter") : "");
    });
  });
  s.Get(R"(/api/components/([^/]+)/(pmm|wd_pmm|user_pass))",
        [&svc](const httplib::Request& req, httplib::Response& res) {
          respond(res, [&] { return svc.file_text(req.matches[1], req.matches[2]); });
        });
  s.Post("/api/eval", [&svc](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return svc.eval(parse_body(req)); });
  });
  s.Post(R"(/api/components/([^/]+)/pipeline)", [&svc](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return svc.pipeline(req.matches[1], parse_body(req)); });
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    ApiError err(res.status, res.status == 404 ? "not_found" : "http_error", "no such endpoint");
    res.set_content(error_json(err).dump(2), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace bevalkit
