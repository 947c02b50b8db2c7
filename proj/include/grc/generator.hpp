#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "grc/errors.hpp"
#include "grc/image.hpp"
#include "grc/transforms.hpp"

namespace grc {

struct GeneratorQuery {
    const CropImage* image = nullptr;
    std::string prompt;
    int view_index = 1;
};

struct GeneratorReply {
    std::string text;
    std::optional<double> mean_token_logprob;
    std::optional<double> latency_ms;
};

/// The frozen generator as a black box: (view image, prompt) -> decoded
/// string. Implementations must be safe to call from multiple threads.
class Generator {
public:
    virtual ~Generator() = default;
    virtual GeneratorReply generate(const GeneratorQuery& q) = 0;
    /// Stable identity string recorded in run metadata and cache keys.
    virtual std::string identity() const = 0;
};

/// Per-view query result; a failed backend call yields an error message
/// instead of a reply and the view is treated as absent downstream.
struct ViewOutcome {
    int view_index = 0;
    std::optional<GeneratorReply> reply;
    std::string error;
};

/// Front door to a generator backend: caches replies keyed by (backend
/// identity, image content hash, prompt) and counts actual backend calls.
/// Safe for concurrent use.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Generator> backend, bool cache_enabled = true)
        : backend_(std::move(backend)), cache_enabled_(cache_enabled) {}

    /// Single query; identical repeats cost one backend call when caching is
    /// enabled. Backend exceptions propagate.
    GeneratorReply query(const GeneratorQuery& q) {
        std::string key;
        if (cache_enabled_) {
            key = cache_key(q);
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        GeneratorReply reply = call_backend(q);
        if (cache_enabled_) {
            std::lock_guard<std::mutex> lock(mutex_);
            cache_.emplace(std::move(key), reply);
        }
        return reply;
    }

    /// Query every view with the same prompt. One outcome per view, ordered
    /// by view index; per-view failures are recorded, never fatal. Up to
    /// `parallelism` queries run concurrently.
    std::vector<ViewOutcome> query_all_views(const std::vector<View>& views,
                                             const std::string& prompt,
                                             int parallelism = 1) {
        std::vector<ViewOutcome> out(views.size());
        auto run_one = [&](std::size_t i) {
            out[i].view_index = views[i].index;
            GeneratorQuery q;
            q.image = &views[i].image;
            q.prompt = prompt;
            q.view_index = views[i].index;
            try {
                out[i].reply = query(q);
            } catch (const Error& e) {
                out[i].error = e.what();
            }
        };
        if (parallelism <= 1 || views.size() <= 1) {
            for (std::size_t i = 0; i < views.size(); ++i) run_one(i);
            return out;
        }
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < views.size();
                 i = next.fetch_add(1))
                run_one(i);
        };
        std::vector<std::future<void>> pool;
        int n_workers = std::min<int>(parallelism, static_cast<int>(views.size()));
        for (int w = 0; w < n_workers; ++w)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
        return out;
    }

    std::uint64_t backend_calls() const { return calls_.load(); }
    void reset_call_count() { calls_.store(0); }
    void clear_cache() {
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.clear();
    }

    bool cache_enabled() const { return cache_enabled_; }
    const Generator& backend() const { return *backend_; }

private:
    // The view index is part of the key: scripted backends answer per view,
    // and a sampled transform can degenerate to the identity, making two
    // views byte-identical. Keying on content alone would then let caching
    // change decisions.
    std::string cache_key(const GeneratorQuery& q) const {
        return backend_->identity() + "|v" + std::to_string(q.view_index) + "|" +
               std::to_string(q.image->width) + "x" +
               std::to_string(q.image->height) + "x" +
               std::to_string(q.image->channels) + "|" +
               std::to_string(content_hash(*q.image)) + "|" + q.prompt;
    }

    GeneratorReply call_backend(const GeneratorQuery& q) {
        calls_.fetch_add(1);
        return backend_->generate(q);
    }

    std::shared_ptr<Generator> backend_;
    bool cache_enabled_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, GeneratorReply> cache_;
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace grc
