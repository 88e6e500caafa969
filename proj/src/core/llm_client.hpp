// Copyright 2026 the ragmark project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace ragmark {

// A chat-completion endpoint. base_url carries the API prefix, e.g.
// "http://localhost:11434/v1"; requests go to {base_url}/chat/completions.
// The schemes "mock:context-aware" and "mock:uniform" select the built-in
// deterministic backend instead of HTTP.
struct ModelEndpoint {
  std::string base_url;
  std::string model_name;
  double temperature = 0.0;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  std::string api_key_env;  // env var holding a bearer token; empty = none
  double backoff_base_seconds = 1.0;
  bool log_raw = false;

  bool is_mock() const { return base_url.rfind("mock:", 0) == 0; }
};

struct PromptBundle {
  std::string context;  // empty for the no-retrieval baseline
  std::string question;
  std::map<char, std::string> options;  // letters contiguous from 'A'
};

// Throws unless the bundle has >= 2 options with letters contiguous from A.
void validate_bundle(const PromptBundle& bundle);

// "Context: {context}\nQuestion: {question}\nA. ...\nB. ...\nAnswer:"
// The Context line is omitted when context is empty.
std::string build_prompt(const PromptBundle& bundle);

struct Completion {
  std::string text;
  double latency_ms = 0.0;
  int attempt = 1;
};

struct HttpReply {
  int status = 0;  // 0 = transport failure (connect/timeout)
  std::string body;
  std::string error;
};

using HttpTransport = std::function<HttpReply(
    const std::string& url, const std::string& body, const std::string& bearer)>;

// OpenAI-compatible chat-completions client. Retries transport failures and
// 5xx responses with exponential backoff (base doubling, multiplicative
// jitter) up to max_retries; 4xx responses fail immediately.
class ChatClient {
 public:
  explicit ChatClient(ModelEndpoint endpoint);
  ChatClient(ModelEndpoint endpoint, HttpTransport transport);

  Completion complete(const std::string& prompt,
                      std::optional<std::uint64_t> seed = std::nullopt) const;

  const ModelEndpoint& endpoint() const { return endpoint_; }

 private:
  ModelEndpoint endpoint_;
  HttpTransport transport_;
};

// Deterministic test backend. With context_aware set and the gold option's
// text appearing verbatim in bundle.context, answers the gold letter;
// otherwise answers a (seed, bundle)-derived pseudo-random option letter.
// Output phrasing is always "The answer is X."
Completion mock_complete(std::uint64_t seed, const PromptBundle& bundle,
                         char gold, bool context_aware);

}  // namespace ragmark
