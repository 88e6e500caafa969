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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "core/llm_client.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <thread>

#include "json.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

namespace ragmark {

namespace {

using nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix, possibly empty
};

SplitUrl split_url(const std::string& base_url) {
  std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::invalid_argument, "endpoint URL must include a scheme: " + base_url);
  }
  std::size_t path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

HttpTransport make_http_transport(double timeout_seconds) {
  return [timeout_seconds](const std::string& url, const std::string& body,
                           const std::string& bearer) -> HttpReply {
    SplitUrl parts = split_url(url);
    httplib::Client client(parts.origin);
    auto timeout = std::chrono::duration<double>(timeout_seconds);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);
    auto res = client.Post(parts.prefix + "/chat/completions", headers, body,
                           "application/json");
    if (!res) {
      return {0, "", httplib::to_string(res.error())};
    }
    return {res->status, res->body, ""};
  };
}

std::string resolve_bearer(const std::string& api_key_env) {
  if (api_key_env.empty()) return "";
  const char* value = std::getenv(api_key_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::validation,
                "API key environment variable is not set: " + api_key_env);
  }
  return value;
}

double jitter_factor() {
  thread_local std::mt19937_64 engine{std::random_device{}()};
  return 0.5 + static_cast<double>(engine() >> 11) * 0x1.0p-53;  // [0.5, 1.5)
}

}  // namespace

void validate_bundle(const PromptBundle& bundle) {
  if (bundle.options.size() < 2 || bundle.options.size() > 5) {
    throw Error(ErrorCode::invalid_argument, "prompt bundle needs 2 to 5 options");
  }
  char expected = 'A';
  for (const auto& [letter, text] : bundle.options) {
    if (letter != expected) {
      throw Error(ErrorCode::invalid_argument,
                  "option letters must be contiguous from A");
    }
    ++expected;
  }
}

std::string build_prompt(const PromptBundle& bundle) {
  validate_bundle(bundle);
  std::string prompt;
  if (!bundle.context.empty()) {
    prompt += "Context: ";
    prompt += bundle.context;
    prompt += '\n';
  }
  prompt += "Question: ";
  prompt += bundle.question;
  prompt += '\n';
  for (const auto& [letter, text] : bundle.options) {
    prompt += letter;
    prompt += ". ";
    prompt += text;
    prompt += '\n';
  }
  prompt += "Answer:";
  return prompt;
}

ChatClient::ChatClient(ModelEndpoint endpoint)
    : endpoint_(std::move(endpoint)),
      transport_(make_http_transport(endpoint_.timeout_seconds)) {}

ChatClient::ChatClient(ModelEndpoint endpoint, HttpTransport transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {}

Completion ChatClient::complete(const std::string& prompt,
                                std::optional<std::uint64_t> seed) const {
  if (endpoint_.is_mock()) {
    throw Error(ErrorCode::invalid_argument,
                "ChatClient cannot serve mock endpoints; use mock_complete");
  }
  std::string bearer = resolve_bearer(endpoint_.api_key_env);

  json body = {
      {"model", endpoint_.model_name},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"temperature", endpoint_.temperature},
  };
  if (seed) body["seed"] = *seed;
  std::string payload = body.dump();
  std::string url = endpoint_.base_url;

  if (endpoint_.log_raw) {
    std::fprintf(stderr, "[ragmark] request %s: %s\n", url.c_str(), payload.c_str());
  }

  const int max_attempts = endpoint_.max_retries + 1;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto started = std::chrono::steady_clock::now();
    HttpReply reply = transport_(url, payload, bearer);
    double latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  started)
            .count();
    if (endpoint_.log_raw) {
      std::fprintf(stderr, "[ragmark] response status=%d: %s\n", reply.status,
                   reply.status == 0 ? reply.error.c_str() : reply.body.c_str());
    }

    if (reply.status == 200) {
      json parsed = json::parse(reply.body, nullptr, false);
      if (parsed.is_discarded() || !parsed.contains("choices") ||
          !parsed["choices"].is_array() || parsed["choices"].empty() ||
          !parsed["choices"][0].contains("message") ||
          !parsed["choices"][0]["message"].contains("content") ||
          !parsed["choices"][0]["message"]["content"].is_string()) {
        throw Error(ErrorCode::parse, "malformed completion response body");
      }
      Completion completion;
      completion.text = parsed["choices"][0]["message"]["content"].get<std::string>();
      completion.latency_ms = latency_ms;
      completion.attempt = attempt;
      return completion;
    }

    if (reply.status >= 400 && reply.status < 500) {
      throw Error(ErrorCode::http, "endpoint returned HTTP " +
                                       std::to_string(reply.status) + ": " + reply.body);
    }

    // Transport failure or 5xx: retry with backoff if attempts remain.
    last_error = reply.status == 0
                     ? "transport failure: " + reply.error
                     : "HTTP " + std::to_string(reply.status);
    if (attempt < max_attempts) {
      double delay = endpoint_.backoff_base_seconds *
                     static_cast<double>(1ULL << (attempt - 1)) * jitter_factor();
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }
  throw Error(ErrorCode::http, "completion failed after " +
                                   std::to_string(max_attempts) +
                                   " attempts; last error: " + last_error);
}

Completion mock_complete(std::uint64_t seed, const PromptBundle& bundle,
                         char gold, bool context_aware) {
  validate_bundle(bundle);
  auto gold_it = bundle.options.find(gold);
  if (gold_it == bundle.options.end()) {
    throw Error(ErrorCode::invalid_argument,
                std::string("gold letter is not an option: ") + gold);
  }

  char letter;
  if (context_aware && !gold_it->second.empty() &&
      bundle.context.find(gold_it->second) != std::string::npos) {
    letter = gold;
  } else {
    std::uint64_t hash = splitmix64(seed);
    hash = fnv1a64(bundle.context, hash);
    hash = fnv1a64("\x1f", hash);
    hash = fnv1a64(bundle.question, hash);
    for (const auto& [opt_letter, opt_text] : bundle.options) {
      hash = fnv1a64(std::string_view(&opt_letter, 1), hash);
      hash = fnv1a64(opt_text, hash);
      hash = fnv1a64("\x1f", hash);
    }
    std::uint64_t pick = splitmix64(hash) % bundle.options.size();
    letter = static_cast<char>('A' + pick);
  }

  Completion completion;
  completion.text = std::string("The answer is ") + letter + ".";
  completion.latency_ms = 0.0;
  completion.attempt = 1;
  return completion;
}

}  // namespace ragmark
