#pragma once

#include <chrono>
#include <string>

#include "vnsum/extract.hpp"
#include "vnsum/retry.hpp"

namespace vnsum {

struct PromptSpec {
    std::string system_text;
    // Must contain the placeholder {sentences} exactly once.
    std::string user_template;
    int max_output_tokens = 256;
    double temperature = 0.0;
};

// Raises InvalidArgument when the placeholder or token budget rule is broken.
void validate_prompt_spec(const PromptSpec& spec);

PromptSpec make_prompt_spec(std::string system_text, std::string user_template,
                            int max_output_tokens = 256,
                            double temperature = 0.0);

const PromptSpec& default_prompt_spec();

struct RenderedPrompt {
    std::string cluster_id;
    std::string system_text;
    std::string user_text;
};

struct AbstractiveSummary {
    std::string cluster_id;
    std::string text;       // collapse_repetition(raw_text), never empty
    std::string model_name;
    std::string raw_text;   // completion exactly as returned
    std::string request_id;
};

// Joins the extractive picks with ". " and substitutes them into the
// template. The picks carry the ordering chosen by the extractive stage.
RenderedPrompt build_prompt(const ExtractiveSummary& es, const PromptSpec& spec);

// Collapses runs of consecutive identical tokens (compared lowercased and
// ignoring punctuation stuck to token edges), then drops consecutive
// exactly-identical sentences. Never introduces tokens absent from the input.
std::string collapse_repetition(const std::string& input);

// Chat-completions endpoint client. One request per cluster summary; at most
// max_in_flight requests run concurrently across threads sharing a client.
struct LlmClientOptions {
    std::string url;    // e.g. http://127.0.0.1:9090/v1/chat/completions
    std::string token;  // optional bearer token
    std::string model = "vbd-llama2-7b-50b";
    std::chrono::seconds timeout{60};
    // Transient failures (transport errors, HTTP 5xx) are retried; the
    // defaults give waits of 1s, 2s and 4s between the four attempts.
    RetryPolicy retry{4, std::chrono::milliseconds(1000), 2.0};
    std::size_t max_in_flight = 2;
};

class LlmClient {
  public:
    explicit LlmClient(LlmClientOptions options);
    ~LlmClient();

    LlmClient(const LlmClient&) = delete;
    LlmClient& operator=(const LlmClient&) = delete;

    const LlmClientOptions& options() const { return options_; }

    AbstractiveSummary complete(const RenderedPrompt& prompt,
                                const PromptSpec& spec);

  private:
    struct Gate;
    AbstractiveSummary attempt(const RenderedPrompt& prompt,
                               const PromptSpec& spec);

    LlmClientOptions options_;
    std::unique_ptr<Gate> gate_;
};

// Sends one chat-completion request and post-processes the completion.
AbstractiveSummary summarize(LlmClient& client, const RenderedPrompt& prompt,
                             const PromptSpec& spec);

}  // namespace vnsum
