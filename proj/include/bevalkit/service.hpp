#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bevalkit/eval.hpp"
#include "bevalkit/po_store.hpp"
#include "bevalkit/rules.hpp"

namespace bevalkit {

/// Request failure with an HTTP status and a machine-readable code.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(message), status_(status), code_(std::move(code)), line_(line), column_(column) {}

  int status() const { return status_; }
  const std::string& code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int status_;
  std::string code_;
  int line_;
  int column_;
};

/// Maps the exception in flight to an ApiError (parse errors 422, unknown
/// names 404, bad input 422, anything else 500). Call from a catch block.
ApiError current_api_error();
nlohmann::json error_json(const ApiError& err);

/// A directory of `*.pos` interchange files and their sidecars.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root,
                     std::chrono::milliseconds lock_wait = std::chrono::milliseconds(2000));

  const std::filesystem::path& root() const { return root_; }
  /// Component name to interchange file, for every file that imports.
  std::map<std::string, std::filesystem::path> scan() const;
  /// Throws ApiError 404 for an unknown name.
  Component load(const std::string& name) const;

  /// Runs `fn` on a detached copy of the component while holding its lock and
  /// writes the sidecar files only if `fn` returns normally. Throws ApiError
  /// 409 if the lock is not obtained within the configured wait.
  template <class Fn>
  auto mutate(const std::string& name, Fn&& fn) {
    std::unique_lock lock(lock_for(name), std::defer_lock);
    if (!lock.try_lock_for(lock_wait_))
      throw ApiError(409, "conflict", "component " + name + " is busy with another change");
    Component c = load(name);
    const auto directory = c.directory;
    c.directory.clear();
    auto result = fn(c);
    c.directory = directory;
    c.save_state();
    return result;
  }

 private:
  std::timed_mutex& lock_for(const std::string& name);

  std::filesystem::path root_;
  std::chrono::milliseconds lock_wait_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::timed_mutex>> locks_;
};

struct EvalRequest {
  std::optional<std::string> component;
  std::optional<std::string> po;
  std::optional<std::string> goal;
  std::vector<std::string> hypotheses;
  EvalParams params;
  bool add_rule = false;
  /// Route an added rule to the well-definedness rule file.
  bool wd = false;
};

struct RuleOutcome {
  bool added = false;
  std::string theory_name;
  std::string file;
  std::string message;
};

struct EvalResponse {
  EvalResult result;
  EvalParams params;
  std::optional<RuleOutcome> rule;
};

/// Evaluates a request against an optional component. With add_rule and a
/// TRUE verdict the rule is appended to `component` and its PO marked
/// PROVED_BEVAL. Errors are ApiError, ParseError or std::invalid_argument.
EvalResponse evaluate(const EvalRequest& request, Component* component, const Clock& clock);

EvalRequest eval_request_from_json(const nlohmann::json& body);
nlohmann::json to_json(const EvalResponse& r);

struct ServiceConfig {
  std::filesystem::path workspace;
  std::int64_t timeout_cap_ms = 60000;
  std::chrono::milliseconds lock_wait{2000};
  Clock clock = Clock::system();
};

/// Transport-independent handlers behind the HTTP API.
class Service {
 public:
  explicit Service(ServiceConfig config);

  Workspace& workspace() { return workspace_; }

  nlohmann::json components();
  nlohmann::json pos(const std::string& component, const std::string& filter);
  nlohmann::json eval(const nlohmann::json& body);
  nlohmann::json pipeline(const std::string& component, const nlohmann::json& body);
  /// `which` is pmm, wd_pmm or user_pass.
  nlohmann::json file_text(const std::string& component, const std::string& which);

 private:
  EvalParams capped(EvalParams p) const;

  ServiceConfig config_;
  Workspace workspace_;
};

/// HTTP front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the listener failed.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bevalkit
