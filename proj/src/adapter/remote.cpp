#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "flowsynth/adapter/generator.hpp"
#include "flowsynth/errors.hpp"

namespace flowsynth {

namespace {

constexpr std::size_t kExcerptBytes = 200;

struct Failure {
  ErrorCode code;
  std::string message;
  bool retryable;
};

std::string excerpt(const std::string& body) {
  if (body.size() <= kExcerptBytes) return body;
  return body.substr(0, kExcerptBytes) + "...";
}

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

void LlmLog::write(const nlohmann::ordered_json& record) {
  std::lock_guard lock(mu_);
  *out_ << record.dump() << '\n';
  out_->flush();
}

void validate_config(const GeneratorConfig& cfg) {
  if (cfg.endpoint.rfind("http://", 0) != 0 && cfg.endpoint.rfind("https://", 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint must be an http(s) URL: " + cfg.endpoint, cfg.endpoint);
  }
  if (cfg.retries < 0) throw Error(ErrorCode::kInvalidArgument, "retries must be >= 0");
  if (cfg.max_in_flight < 1 || cfg.max_in_flight > 1024) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be in [1, 1024]");
  }
  if (!(cfg.timeout_seconds > 0)) throw Error(ErrorCode::kInvalidArgument, "timeout must be positive");
}

RemoteGenerator::RemoteGenerator(GeneratorConfig cfg, LlmLog* log)
    : cfg_(std::move(cfg)), log_(log), slots_(std::max(cfg_.max_in_flight, 1)) {
  validate_config(cfg_);
  const auto scheme_end = cfg_.endpoint.find("://") + 3;
  const auto path_start = cfg_.endpoint.find('/', scheme_end);
  base_ = cfg_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
}

std::string RemoteGenerator::generate(const GenerationRequest& req) {
  validate_request(req);
  std::string token;
  if (!cfg_.auth_token_env.empty()) {
    const char* v = std::getenv(cfg_.auth_token_env.c_str());
    if (v == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "auth token variable " + cfg_.auth_token_env + " is not set",
                  cfg_.auth_token_env);
    }
    token = v;
  }
  const auto wire = request_to_json(req);
  const std::string body = wire.dump();

  auto backoff = cfg_.initial_backoff;
  for (int attempt_no = 0;; ++attempt_no) {
    Failure failure{ErrorCode::kTransport, "", false};
    try {
      std::string text;
      {
        SlotGuard slot(slots_);
        text = attempt(body, token);
      }
      if (log_ != nullptr) {
        log_->write({{"request", wire}, {"tags", req.tags}, {"attempt", attempt_no + 1}, {"response", text}});
      }
      return text;
    } catch (const Failure& f) {
      failure = f;
    }
    if (log_ != nullptr) {
      log_->write({{"request", wire},
                   {"tags", req.tags},
                   {"attempt", attempt_no + 1},
                   {"error", std::string(error_code_name(failure.code))},
                   {"detail", failure.message}});
    }
    if (!failure.retryable || attempt_no >= cfg_.retries) {
      throw Error(failure.code,
                  failure.message + " (after " + std::to_string(attempt_no + 1) + " attempt" +
                      (attempt_no == 0 ? "" : "s") + ")",
                  cfg_.endpoint);
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

std::string RemoteGenerator::attempt(const std::string& body, const std::string& token) {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(cfg_.timeout_seconds);
  const auto usecs = static_cast<time_t>((cfg_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto err = res.error();
    const bool timed_out =
        err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= cfg_.timeout_seconds);
    if (timed_out) throw Failure{ErrorCode::kTimeout, "request timed out", true};
    throw Failure{ErrorCode::kTransport, "transport error: " + httplib::to_string(err), true};
  }
  if (res->status < 200 || res->status >= 300) {
    const bool retryable = res->status == 429 || res->status >= 500;
    throw Failure{ErrorCode::kProtocol, "HTTP " + std::to_string(res->status) + ": " + excerpt(res->body), retryable};
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw Failure{ErrorCode::kMalformedResponse, "reply is not JSON: " + excerpt(res->body), false};
  }
  if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
    throw Failure{ErrorCode::kMalformedResponse, "reply lacks a string \"text\" field: " + excerpt(res->body), false};
  }
  return reply["text"].get<std::string>();
}

}  // namespace flowsynth
