#pragma once

#include <set>
#include <string>
#include <string_view>

namespace drkit::divergence {

// Bundled English stopword list (172 function words), lowercase. Single-letter
// entries cover the fragments the tokenizer produces from contractions
// ("don't" -> "don", "t"). Callers can replace the set wholesale via
// DivergenceConfig or the --stopwords flag.
inline constexpr std::string_view kDefaultStopwords[] = {
    "a", "about", "above", "after", "again", "against", "ain", "all",
    "also", "am", "among", "an", "and", "any", "are", "aren",
    "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "cannot", "could", "couldn",
    "d", "did", "didn", "do", "does", "doesn", "doing", "don",
    "down", "during", "each", "ever", "few", "for", "from", "further",
    "get", "had", "hadn", "has", "hasn", "have", "haven", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his",
    "how", "however", "i", "if", "in", "into", "is", "isn",
    "it", "its", "itself", "just", "let", "ll", "m", "ma",
    "many", "me", "mightn", "more", "most", "much", "must", "mustn",
    "my", "myself", "needn", "never", "no", "nor", "not", "now",
    "o", "of", "off", "on", "once", "only", "or", "other",
    "our", "ours", "ourselves", "out", "over", "own", "re", "s",
    "same", "shan", "she", "should", "shouldn", "since", "so", "some",
    "such", "t", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "through",
    "to", "too", "under", "until", "up", "upon", "us", "ve",
    "very", "via", "was", "wasn", "we", "were", "weren", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will",
    "with", "within", "without", "won", "would", "wouldn", "y", "you",
    "your", "yours", "yourself", "yourselves",
};

inline std::set<std::string> default_stopwords() {
    std::set<std::string> words;
    for (const auto w : kDefaultStopwords) words.emplace(w);
    return words;
}

}  // namespace drkit::divergence
