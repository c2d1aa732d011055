// Command-line front end: evaluate goals, run the prover pipeline, serve the API.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bevalkit/json_io.hpp"
#include "bevalkit/pipeline.hpp"
#include "bevalkit/po_store.hpp"
#include "bevalkit/service.hpp"

namespace {

using namespace bevalkit;

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;

std::filesystem::path workspace_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BEVALKIT_WORKSPACE")) return env;
  return ".";
}

// A component given as a path to a `.pos` file or as a name in the workspace.
Component open_component(const std::string& spec, const std::filesystem::path& workspace) {
  if (std::filesystem::is_regular_file(spec)) return load_component(spec);
  return Workspace(workspace).load(spec);
}

void print_result(const EvalResponse& r) {
  std::cout << to_string(r.result.verdict) << "\n";
  std::cout << "elapsed_ms: " << r.result.elapsed_ms << "\n";
  if (r.result.reason)
    std::cout << "reason: " << to_string(*r.result.reason) << " (" << r.result.detail << ")\n";
  if (r.result.counterexample) {
    std::cout << "counterexample:";
    if (r.result.counterexample->empty()) std::cout << " {}";
    for (const auto& b : *r.result.counterexample) std::cout << " " << b.name << "=" << b.value.to_string();
    std::cout << "\n";
  }
  std::cout << "params: " << r.params.to_flag_string() << "\n";
  if (r.rule) {
    if (r.rule->added)
      std::cout << "rule: " << r.rule->theory_name << " -> " << r.rule->file << "\n";
    else
      std::cout << "rule: " << r.rule->message << "\n";
  }
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::True: return kExitTrue;
    case Verdict::False: return kExitFalse;
    case Verdict::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

HttpServer* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof obligation evaluator and rule generator"};
  app.require_subcommand(1);

  std::string workspace_flag;
  std::string params_text;

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a goal under hypotheses");
  std::optional<std::string> goal;
  std::vector<std::string> hyps;
  std::string component_spec;
  std::optional<std::string> po_name;
  bool add_rule = false;
  bool wd = false;
  bool as_json = false;
  eval_cmd->add_option("--goal", goal, "Predicate to evaluate");
  eval_cmd->add_option("--hyp", hyps, "Hypothesis (repeatable)");
  eval_cmd->add_option("--component", component_spec, "Component name or .pos file");
  eval_cmd->add_option("--po", po_name, "Proof obligation of the component");
  eval_cmd->add_option("--params", params_text, "Flag string, e.g. \"-p init -p TIME_OUT 5000\"");
  eval_cmd->add_flag("--add-rule", add_rule, "Append a rule when the verdict is TRUE");
  eval_cmd->add_flag("--wd", wd, "Send the rule to the well-definedness rule file");
  eval_cmd->add_flag("--json", as_json, "Print the result as JSON");
  eval_cmd->add_option("--workspace", workspace_flag, "Workspace directory (default $BEVALKIT_WORKSPACE)");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run F1, F1;F2;F3 and F1;F2;F3;BEval");
  std::vector<std::string> component_files;
  bool emit_rules = false;
  bool csv = false;
  bool serial = false;
  pipeline_cmd->add_option("--component-file", component_files, "Interchange file (repeatable)")->required();
  pipeline_cmd->add_flag("--emit-rules", emit_rules, "Append rules and User_Pass entries");
  pipeline_cmd->add_flag("--csv", csv, "Print CSV instead of the table");
  pipeline_cmd->add_flag("--serial", serial, "Evaluate POs one at a time");
  pipeline_cmd->add_option("--params", params_text, "Evaluation flag string");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve_cmd->add_option("--port", port, "Port (0 picks a free one)");
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--workspace", workspace_flag, "Workspace directory (default $BEVALKIT_WORKSPACE)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (eval_cmd->parsed()) {
      EvalRequest request;
      request.goal = goal;
      request.hypotheses = hyps;
      request.po = po_name;
      request.add_rule = add_rule;
      request.wd = wd;
      request.params = EvalParams::from_flag_string(params_text);
      std::optional<Component> component;
      if (!component_spec.empty()) component = open_component(component_spec, workspace_root(workspace_flag));
      EvalResponse response;
      if (component && add_rule) {
        const auto directory = component->directory;
        component->directory.clear();
        response = evaluate(request, &*component, Clock::system());
        component->directory = directory;
        if (response.rule && response.rule->added) component->save_state();
      } else {
        response = evaluate(request, component ? &*component : nullptr, Clock::system());
      }
      if (as_json)
        std::cout << to_json(response).dump(2) << "\n";
      else
        print_result(response);
      return exit_code(response.result.verdict);
    }

    if (pipeline_cmd->parsed()) {
      PipelineOptions options;
      options.params = EvalParams::from_flag_string(params_text);
      options.emit_rules = emit_rules;
      options.parallel = !serial;
      std::vector<PipelineReport> reports;
      for (const auto& file : component_files) {
        Component c = load_component(file);
        reports.push_back(run_pipeline(c, options));
      }
      std::cout << (csv ? render_csv(reports) : render_report(reports));
      return 0;
    }

    if (serve_cmd->parsed()) {
      ServiceConfig config;
      config.workspace = workspace_root(workspace_flag);
      Service service(config);
      HttpServer server(service);
      const int bound = server.bind(host, port);
      active_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "serving " << config.workspace.string() << " on http://" << host << ":" << bound
                << std::endl;
      const bool ok = server.run();
      active_server = nullptr;
      return ok ? 0 : 1;
    }
  } catch (...) {
    ApiError err = current_api_error();
    std::cerr << "error: " << err.what() << "\n";
    return err.status() == 500 ? 1 : kExitUsage;
  }
  return kExitUsage;
}
