#include "vnsum/abstract.hpp"

#include <condition_variable>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "vnsum/error.hpp"
#include "vnsum/text.hpp"

namespace vnsum {

namespace {

constexpr std::string_view kPlaceholder = "{sentences}";

std::size_t placeholder_count(const std::string& s) {
    std::size_t count = 0;
    for (std::size_t pos = s.find(kPlaceholder); pos != std::string::npos;
         pos = s.find(kPlaceholder, pos + kPlaceholder.size())) {
        ++count;
    }
    return count;
}

// Comparison key for run collapse: strip non-alphanumeric codepoints from the
// token edges, lowercase the rest. Tokens that are pure punctuation keep
// their (lowercased) spelling so "." and "!" stay distinct.
std::string collapse_key(const std::string& token) {
    std::vector<char32_t> cps;
    std::size_t pos = 0;
    char32_t cp = 0;
    while (pos < token.size()) {
        std::size_t n = text::decode_utf8(token, pos, cp);
        if (n == 0) {
            cp = static_cast<unsigned char>(token[pos]);
            n = 1;
        }
        cps.push_back(cp);
        pos += n;
    }
    std::size_t begin = 0;
    std::size_t end = cps.size();
    const auto is_alnum = [](char32_t c) {
        return text::is_letter(c) || text::is_digit(c);
    };
    while (begin < end && !is_alnum(cps[begin])) ++begin;
    while (end > begin && !is_alnum(cps[end - 1])) --end;
    if (begin == end) {
        begin = 0;
        end = cps.size();
    }
    std::string key;
    for (std::size_t i = begin; i < end; ++i) {
        text::append_utf8(key, text::to_lower(cps[i]));
    }
    return key;
}

bool is_terminator_cp(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?';
}

// Splits a space-joined token sequence into sentence segments, cutting only
// after a terminator that ends a token (so "3.5" stays whole). Terminators
// stay attached; segments are whole-token runs.
std::vector<std::string> sentence_segments(
    const std::vector<std::string>& tokens) {
    std::vector<std::string> segments;
    std::string current;
    for (const auto& token : tokens) {
        if (!current.empty()) current += ' ';
        current += token;
        char32_t last = 0;
        char32_t cp = 0;
        std::size_t p = 0;
        while (p < token.size()) {
            std::size_t n = text::decode_utf8(token, p, cp);
            if (n == 0) {
                cp = static_cast<unsigned char>(token[p]);
                n = 1;
            }
            last = cp;
            p += n;
        }
        if (is_terminator_cp(last)) {
            segments.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) segments.push_back(std::move(current));
    return segments;
}

}  // namespace

void validate_prompt_spec(const PromptSpec& spec) {
    if (placeholder_count(spec.user_template) != 1) {
        raise(Errc::invalid_argument,
              "user_template must contain {sentences} exactly once");
    }
    if (spec.max_output_tokens < 1) {
        raise(Errc::invalid_argument, "max_output_tokens must be >= 1");
    }
}

PromptSpec make_prompt_spec(std::string system_text, std::string user_template,
                            int max_output_tokens, double temperature) {
    PromptSpec spec;
    spec.system_text = std::move(system_text);
    spec.user_template = std::move(user_template);
    spec.max_output_tokens = max_output_tokens;
    spec.temperature = temperature;
    validate_prompt_spec(spec);
    return spec;
}

const PromptSpec& default_prompt_spec() {
    static const PromptSpec spec = make_prompt_spec(
        "Summarize the following Vietnamese sentences into one coherent "
        "paragraph, preserving facts.",
        "{sentences}");
    return spec;
}

RenderedPrompt build_prompt(const ExtractiveSummary& es,
                            const PromptSpec& spec) {
    validate_prompt_spec(spec);
    if (es.picks.empty()) {
        raise(Errc::empty_extract,
              "cluster '" + es.cluster_id + "' has no extracted sentences");
    }
    std::string joined;
    for (std::size_t i = 0; i < es.picks.size(); ++i) {
        if (i > 0) joined += ". ";
        joined += es.picks[i].sentence.text;
    }
    RenderedPrompt prompt;
    prompt.cluster_id = es.cluster_id;
    prompt.system_text = spec.system_text;
    prompt.user_text = spec.user_template;
    prompt.user_text.replace(prompt.user_text.find(kPlaceholder),
                             kPlaceholder.size(), joined);
    return prompt;
}

std::string collapse_repetition(const std::string& input) {
    const std::vector<std::string> tokens = text::split_whitespace(input);
    std::vector<std::string> kept;
    std::string last_key;
    for (const auto& token : tokens) {
        std::string key = collapse_key(token);
        if (!kept.empty() && key == last_key) continue;
        kept.push_back(token);
        last_key = std::move(key);
    }

    const std::vector<std::string> segments = sentence_segments(kept);
    std::vector<std::string> unique_segments;
    for (const auto& segment : segments) {
        if (!unique_segments.empty() && segment == unique_segments.back()) {
            continue;
        }
        unique_segments.push_back(segment);
    }
    return text::join(unique_segments, " ");
}

struct LlmClient::Gate {
    explicit Gate(std::size_t slots) : available(slots) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex);
        cv.wait(lock, [this] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex);
            ++available;
        }
        cv.notify_one();
    }

    std::mutex mutex;
    std::condition_variable cv;
    std::size_t available;
};

LlmClient::LlmClient(LlmClientOptions options) : options_(std::move(options)) {
    if (options_.url.empty()) {
        raise(Errc::invalid_argument, "LLM client needs an endpoint URL");
    }
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
    gate_ = std::make_unique<Gate>(options_.max_in_flight);
}

LlmClient::~LlmClient() = default;

namespace {

// Thrown for failures worth retrying (transport errors, HTTP 5xx); every
// other failure aborts immediately as BadResponse.
struct TransientFailure {
    Errc code;
    std::string detail;
};

}  // namespace

AbstractiveSummary LlmClient::attempt(const RenderedPrompt& prompt,
                                      const PromptSpec& spec) {
    const auto [base, path] = split_url(options_.url);
    httplib::Client client(base);
    client.set_connection_timeout(options_.timeout.count(), 0);
    client.set_read_timeout(options_.timeout.count(), 0);
    client.set_write_timeout(options_.timeout.count(), 0);

    httplib::Headers headers;
    if (!options_.token.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.token);
    }

    nlohmann::json body;
    body["model"] = options_.model;
    body["messages"] = nlohmann::json::array(
        {{{"role", "system"}, {"content", prompt.system_text}},
         {{"role", "user"}, {"content", prompt.user_text}}});
    body["temperature"] = spec.temperature;
    body["max_tokens"] = spec.max_output_tokens;

    const auto res =
        client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransientFailure{Errc::endpoint_unreachable,
                               "POST " + options_.url + ": " +
                                   httplib::to_string(res.error())};
    }
    if (res->status >= 500) {
        throw TransientFailure{Errc::bad_response,
                               "HTTP status " + std::to_string(res->status)};
    }
    if (res->status != 200) {
        raise(Errc::bad_response, "POST " + options_.url + ": HTTP status " +
                                      std::to_string(res->status));
    }

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::bad_response,
              std::string("completion response is not JSON: ") + e.what());
    }
    if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty() ||
        !parsed["choices"][0].contains("message") ||
        !parsed["choices"][0]["message"].contains("content") ||
        !parsed["choices"][0]["message"]["content"].is_string()) {
        raise(Errc::bad_response,
              "completion response lacks choices[0].message.content");
    }

    AbstractiveSummary summary;
    summary.cluster_id = prompt.cluster_id;
    summary.raw_text =
        parsed["choices"][0]["message"]["content"].get<std::string>();
    summary.text = collapse_repetition(summary.raw_text);
    if (summary.text.empty()) {
        raise(Errc::bad_response, "completion is empty for cluster '" +
                                      prompt.cluster_id + "'");
    }
    summary.model_name = parsed.contains("model") && parsed["model"].is_string()
                             ? parsed["model"].get<std::string>()
                             : options_.model;
    summary.request_id = parsed.contains("id") && parsed["id"].is_string()
                             ? parsed["id"].get<std::string>()
                             : "";
    return summary;
}

AbstractiveSummary LlmClient::complete(const RenderedPrompt& prompt,
                                       const PromptSpec& spec) {
    validate_prompt_spec(spec);
    gate_->acquire();
    struct Release {
        Gate* gate;
        ~Release() { gate->release(); }
    } release{gate_.get()};

    const int attempts =
        options_.retry.max_attempts < 1 ? 1 : options_.retry.max_attempts;
    auto delay = options_.retry.initial_delay;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            return this->attempt(prompt, spec);
        } catch (const TransientFailure& failure) {
            last_error = std::string(errc_name(failure.code)) + ": " +
                         failure.detail;
            if (attempts == 1) raise(failure.code, failure.detail);
        }
        if (attempt < attempts && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay = std::chrono::milliseconds(static_cast<long long>(
                static_cast<double>(delay.count()) * options_.retry.multiplier));
        }
    }
    raise(Errc::retries_exhausted,
          "cluster '" + prompt.cluster_id + "': " + std::to_string(attempts) +
              " attempts failed; last error: " + last_error);
}

AbstractiveSummary summarize(LlmClient& client, const RenderedPrompt& prompt,
                             const PromptSpec& spec) {
    return client.complete(prompt, spec);
}

}  // namespace vnsum
