#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <semaphore>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "flowsynth/kbgraph/knowledge_base.hpp"

namespace flowsynth {

struct GenerationRequest {
  std::string prompt;
  double temperature = 0.3;
  double top_p = 0.95;
  int top_k = 5;
  int max_tokens = 1024;
  std::map<std::string, std::string> tags;  // task id, stage, ...
};

// Throws Error(kInvalidArgument) on out-of-range decoding parameters.
void validate_request(const GenerationRequest& req);

// Wire body: {prompt, temperature, top_p, top_k, max_tokens}.
nlohmann::ordered_json request_to_json(const GenerationRequest& req);

class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const GenerationRequest& req) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// remote

struct GeneratorConfig {
  std::string endpoint;               // http://host:port/path
  std::string auth_token_env;         // empty: no Authorization header
  double timeout_seconds = 60.0;
  int retries = 3;                    // extra attempts after the first
  std::chrono::milliseconds initial_backoff{250};  // doubled per retry
  int max_in_flight = 4;
};

void validate_config(const GeneratorConfig& cfg);

// JSON-lines sink for request/response pairs. Safe to share between threads.
class LlmLog {
 public:
  explicit LlmLog(std::ostream& out) : out_(&out) {}
  void write(const nlohmann::ordered_json& record);

 private:
  std::ostream* out_;
  std::mutex mu_;
};

// POSTs the wire body to cfg.endpoint and returns the "text" field of the
// reply. Transport failures, timeouts, 429 and 5xx replies are retried with
// exponential backoff; other non-2xx replies fail at once with kProtocol.
// Errors: kTimeout, kTransport, kProtocol (body excerpt in the message),
// kMalformedResponse.
class RemoteGenerator : public TextGenerator {
 public:
  explicit RemoteGenerator(GeneratorConfig cfg, LlmLog* log = nullptr);

  std::string generate(const GenerationRequest& req) override;
  std::string name() const override { return "remote"; }

 private:
  std::string attempt(const std::string& body, const std::string& token);

  GeneratorConfig cfg_;
  LlmLog* log_;
  std::string base_;  // scheme://host:port
  std::string path_;
  std::counting_semaphore<1024> slots_;
};

// ---------------------------------------------------------------------------
// mock

// CRLF -> LF, trailing whitespace stripped from each line, leading and
// trailing blank lines dropped.
std::string canonicalize_prompt(std::string_view prompt);

// FNV-1a 64 of the canonical prompt as 16 lowercase hex digits.
std::string prompt_fingerprint(std::string_view prompt);
std::uint64_t fnv1a64(std::string_view bytes);

struct MockTable {
  std::map<std::string, std::string> entries;  // fingerprint -> response
  std::optional<std::string> fallback;

  void add(std::string_view prompt, std::string response);
};

// Throws Error(kNoEntry) on a miss without a fallback; subject is the
// fingerprint.
std::string mock_generate(const GenerationRequest& req, const MockTable& table);

// {"entries": {fingerprint: response}, "default": response?}
MockTable parse_mock_table(std::string_view text);
MockTable load_mock_table(const std::filesystem::path& path);
nlohmann::ordered_json mock_table_to_json(const MockTable& table);

class MockGenerator : public TextGenerator {
 public:
  explicit MockGenerator(MockTable table) : table_(std::move(table)) {}
  std::string generate(const GenerationRequest& req) override { return mock_generate(req, table_); }
  std::string name() const override { return "mock"; }

 private:
  MockTable table_;
};

class CallbackGenerator : public TextGenerator {
 public:
  using Fn = std::function<std::string(const GenerationRequest&)>;
  explicit CallbackGenerator(Fn fn, std::string name = "callback") : fn_(std::move(fn)), name_(std::move(name)) {}
  std::string generate(const GenerationRequest& req) override { return fn_(req); }
  std::string name() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// prompt schema lines

// "UNIT <id> | <display name> | in: a, b | out: c, d"
std::string render_unit_schema(const UnitSpec& unit);

struct SchemaLine {
  std::string id;
  std::string display_name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// Every well-formed UNIT line of a prompt, in order.
std::vector<SchemaLine> parse_unit_schemas(std::string_view prompt);

// Offline teacher: one sentence per UNIT line of the prompt naming the unit,
// its first input and its first output.
class TemplateGenerator : public TextGenerator {
 public:
  std::string generate(const GenerationRequest& req) override;
  std::string name() const override { return "template"; }
};

}  // namespace flowsynth
