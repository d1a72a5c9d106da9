#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drkit/detail/sum.hpp"
#include "drkit/error.hpp"
#include "drkit/metrics.hpp"
#include "drkit/stopwords.hpp"

// Word-frequency distributions per domain corpus and Jensen-Shannon
// divergence between domain pairs, the corpus-side drop predictor.

namespace drkit::divergence {

struct Corpus {
    DomainId domain;
    std::vector<std::string> documents;
};

enum class LogBase : std::uint8_t { Two, E };

struct DivergenceConfig {
    std::size_t top_k = 10000;
    std::set<std::string> stopwords = default_stopwords();
    std::size_t min_token_length = 1;
    LogBase log_base = LogBase::Two;
};

namespace detail {

// Word bytes are ASCII alphanumerics plus anything >= 0x80, so multibyte
// UTF-8 sequences stay inside tokens. Case folding is ASCII-only.
inline bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace detail

/// Lowercases and splits on maximal runs of non-alphanumeric bytes.
inline std::vector<std::string> tokenize(std::string_view text,
                                         std::size_t min_token_length = 1) {
    std::vector<std::string> tokens;
    std::string current;
    const auto flush = [&] {
        if (current.size() >= min_token_length) tokens.push_back(current);
        current.clear();
    };
    for (const char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (detail::is_word_byte(uc)) {
            current.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!current.empty()) {
            flush();
        }
    }
    if (!current.empty()) flush();
    return tokens;
}

using TokenCounts = std::map<std::string, std::uint64_t>;

/// Raw token counts of a corpus after stopword and length filtering.
inline TokenCounts count_tokens(const Corpus& corpus, const DivergenceConfig& cfg) {
    TokenCounts counts;
    for (const auto& doc : corpus.documents) {
        for (auto& token : tokenize(doc, cfg.min_token_length)) {
            if (cfg.stopwords.contains(token)) continue;
            ++counts[token];
        }
    }
    return counts;
}

/// Word-probability vector over an explicit shared support.
struct TokenDistribution {
    std::vector<std::string> support;  // combined-frequency rank order
    std::vector<double> probs;

    bool operator==(const TokenDistribution&) const = default;
};

namespace detail {

inline std::pair<TokenDistribution, TokenDistribution> distributions_from_counts(
    const TokenCounts& ca, const TokenCounts& cb, const DomainId& domain_a,
    const DomainId& domain_b, const DivergenceConfig& cfg) {
    if (ca.empty()) raise(Errc::empty_after_filtering, "corpus '" + domain_a.name + "'");
    if (cb.empty()) raise(Errc::empty_after_filtering, "corpus '" + domain_b.name + "'");

    TokenCounts combined = ca;
    for (const auto& [word, count] : cb) combined[word] += count;
    std::vector<std::pair<std::string, std::uint64_t>> ranked(combined.begin(), combined.end());
    std::ranges::sort(ranked, [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > cfg.top_k) ranked.resize(cfg.top_k);

    const auto restrict_to_support = [&](const TokenCounts& counts, const DomainId& domain) {
        TokenDistribution dist;
        dist.support.reserve(ranked.size());
        dist.probs.reserve(ranked.size());
        std::uint64_t total = 0;
        for (const auto& [word, _] : ranked) {
            const auto it = counts.find(word);
            const std::uint64_t c = it == counts.end() ? 0 : it->second;
            dist.support.push_back(word);
            dist.probs.push_back(static_cast<double>(c));
            total += c;
        }
        if (total == 0) {
            raise(Errc::empty_after_filtering,
                  "corpus '" + domain.name + "' has no mass on the shared top-k support");
        }
        for (auto& p : dist.probs) p /= static_cast<double>(total);
        return dist;
    };
    return {restrict_to_support(ca, domain_a), restrict_to_support(cb, domain_b)};
}

}  // namespace detail

/// Shared-support distributions for one corpus pair: support is the top-k
/// words by combined raw frequency (ties lexicographic), stopwords excluded,
/// each side renormalized over that support.
inline std::pair<TokenDistribution, TokenDistribution> pair_distributions(
    const Corpus& a, const Corpus& b, const DivergenceConfig& cfg) {
    return detail::distributions_from_counts(count_tokens(a, cfg), count_tokens(b, cfg),
                                             a.domain, b.domain, cfg);
}

/// JSD(P,Q) = 0.5 KL(P||M) + 0.5 KL(Q||M), M = (P+Q)/2, with 0 log 0 := 0.
/// In [0,1] for base 2, [0, ln 2] for base e. No smoothing: m_i = 0 forces
/// p_i = q_i = 0, so every term is finite.
inline double js_divergence(const TokenDistribution& p, const TokenDistribution& q,
                            LogBase base = LogBase::Two) {
    if (p.support != q.support) {
        raise(Errc::support_mismatch, "distributions have different supports");
    }
    drkit::detail::Accumulator acc;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const double pi = p.probs[i], qi = q.probs[i];
        const double mi = 0.5 * (pi + qi);
        if (pi > 0.0) {
            acc.add(0.5 * pi * (base == LogBase::Two ? std::log2(pi / mi) : std::log(pi / mi)));
        }
        if (qi > 0.0) {
            acc.add(0.5 * qi * (base == LogBase::Two ? std::log2(qi / mi) : std::log(qi / mi)));
        }
    }
    return acc.value();
}

struct DivergenceResult {
    DomainPair pair;
    double jsd = 0.0;
    std::size_t vocab_size_used = 0;

    bool operator==(const DivergenceResult&) const = default;
};

/// One entry per unordered corpus pair, keyed by the (lexicographically
/// smaller, larger) domain pair. Per-pair failures are collected, not fatal.
struct DivergenceMatrix {
    std::map<DomainPair, DivergenceResult> results;
    std::vector<std::string> failures;

    std::map<DomainPair, double> values() const {
        std::map<DomainPair, double> out;
        for (const auto& [pair, r] : results) out[pair] = r.jsd;
        return out;
    }
};

inline DivergenceMatrix divergence_matrix(std::span<const Corpus> corpora,
                                          const DivergenceConfig& cfg) {
    if (corpora.size() < 2) {
        raise(Errc::empty_input, "divergence matrix needs at least 2 corpora");
    }
    std::set<DomainId> seen;
    for (const auto& c : corpora) {
        if (!seen.insert(c.domain).second) {
            raise(Errc::duplicate_key, "duplicate corpus domain '" + c.domain.name + "'");
        }
    }

    // token counts are pair-independent; compute once per corpus
    std::vector<TokenCounts> counts;
    counts.reserve(corpora.size());
    for (const auto& c : corpora) counts.push_back(count_tokens(c, cfg));

    DivergenceMatrix matrix;
    for (std::size_t i = 0; i < corpora.size(); ++i) {
        for (std::size_t j = i + 1; j < corpora.size(); ++j) {
            const auto& da = corpora[i].domain;
            const auto& db = corpora[j].domain;
            const DomainPair key = da < db ? DomainPair{da, db} : DomainPair{db, da};
            try {
                const auto [p, q] = detail::distributions_from_counts(counts[i], counts[j], da,
                                                                      db, cfg);
                matrix.results[key] =
                    DivergenceResult{key, js_divergence(p, q, cfg.log_base), p.support.size()};
            } catch (const Error& e) {
                matrix.failures.push_back("(" + da.name + ", " + db.name + "): " + e.what());
            }
        }
    }
    return matrix;
}

}  // namespace drkit::divergence
