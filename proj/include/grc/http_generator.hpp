#pragma once

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "grc/errors.hpp"
#include "grc/generator.hpp"
#include "grc/image_io.hpp"
#include "grc/text.hpp"

namespace grc {

struct HttpBackendConfig {
    std::string url;  // e.g. http://host:port/generate
    int timeout_ms = 30000;
    int retries = 2;          // retries after the first attempt
    int backoff_ms = 100;     // doubled per retry
};

/// Remote generator adapter. Wire contract: POST <url> with JSON
/// {"image_b64": <base64 PNG bytes>, "prompt": <string>}; the reply is JSON
/// {"text": <string>, "mean_token_logprob": <number, optional>}.
///
/// Transport failures and 5xx responses are retried with exponential
/// backoff, then surface as BackendUnavailableError. Any 2xx body that
/// violates the contract, and any 4xx status, is a MalformedReplyError.
class HttpGenerator : public Generator {
public:
    explicit HttpGenerator(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
        auto pos = cfg_.url.find("://");
        std::string rest = pos == std::string::npos ? cfg_.url : cfg_.url.substr(pos + 3);
        std::string scheme = pos == std::string::npos ? "http" : cfg_.url.substr(0, pos);
        auto slash = rest.find('/');
        host_ = scheme + "://" + (slash == std::string::npos ? rest : rest.substr(0, slash));
        path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    }

    GeneratorReply generate(const GeneratorQuery& q) override {
        nlohmann::json body{{"image_b64", base64_encode(encode_png(*q.image))},
                            {"prompt", q.prompt}};
        const std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(cfg_.backoff_ms << (attempt - 1)));
            auto start = std::chrono::steady_clock::now();
            httplib::Client client(host_);
            client.set_connection_timeout(0, cfg_.timeout_ms * 1000LL);
            client.set_read_timeout(0, cfg_.timeout_ms * 1000LL);
            httplib::Result res = client.Post(path_, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "server status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw MalformedReplyError("backend returned status " +
                                          std::to_string(res->status));
            auto elapsed = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
            return parse_reply(res->body, elapsed);
        }
        throw BackendUnavailableError("backend unreachable after " +
                                      std::to_string(cfg_.retries + 1) +
                                      " attempts: " + last_error);
    }

    std::string identity() const override { return "http:" + cfg_.url; }

private:
    GeneratorReply parse_reply(const std::string& body, double latency_ms) const {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
            !j["text"].is_string())
            throw MalformedReplyError("backend reply is not {text: string, ...}");
        GeneratorReply reply;
        reply.text = j["text"].get<std::string>();
        if (j.contains("mean_token_logprob") && !j["mean_token_logprob"].is_null()) {
            if (!j["mean_token_logprob"].is_number())
                throw MalformedReplyError("mean_token_logprob is not a number");
            double v = j["mean_token_logprob"].get<double>();
            if (!std::isfinite(v))
                throw MalformedReplyError("mean_token_logprob is not finite");
            reply.mean_token_logprob = v;
        }
        reply.latency_ms = latency_ms;
        return reply;
    }

    HttpBackendConfig cfg_;
    std::string host_;
    std::string path_;
};

}  // namespace grc
