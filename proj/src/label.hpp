#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace tg {

enum class PartOfSpeech { Noun, Adjective, Other };

// Token -> part of speech. Tokens missing from the lexicon are nouns.
class Lexicon {
public:
    Lexicon() = default;
    // English function words, common verbs and adverbs tagged as Other.
    static Lexicon english_default();
    static Lexicon load(const std::filesystem::path& path);  // token<TAB>pos, pos in {N, ADJ, OTHER, ...}

    void set(std::string token, PartOfSpeech pos) { tags_[std::move(token)] = pos; }
    PartOfSpeech tag(const std::string& token) const;

private:
    std::unordered_map<std::string, PartOfSpeech> tags_;
};

// Folds simple English plurals: "networks" -> "network", "studies" -> "study".
std::string normalize_token(const std::string& token);
// Normalized, space-joined key for a term.
std::string term_key(const std::vector<std::string>& tokens);

// Every contiguous run of adjectives/nouns inside a maximal adjective/noun run that ends with a noun.
std::vector<std::vector<std::string>> extract_terms(const std::vector<std::string>& title_tokens,
                                                    const Lexicon& lexicon);

struct TermStats {
    std::string term;  // display form
    std::int64_t class_freq = 0;
    std::int64_t corpus_freq = 0;
    double specificity = 0.0;
    double score = 0.0;
};

struct LabelConfig {
    double alpha = 0.67;
    int top_k = 3;

    void validate() const;
};

// Frequency-to-specificity blend: class_freq^alpha * specificity^(1 - alpha).
double tfs_score(std::int64_t class_freq, std::int64_t corpus_freq, double alpha);

// Term occurrence counts per class, keyed by normalized term.
struct TermCounts {
    std::vector<std::map<std::string, std::int64_t>> per_class;
    std::map<std::string, std::int64_t> corpus;
    // Most frequent surface form per key (lexicographic on ties).
    std::map<std::string, std::string> display;
};

TermCounts count_terms(const std::vector<std::vector<std::string>>& title_tokens_per_item,
                       const std::vector<std::uint32_t>& class_of_item, std::uint32_t n_classes,
                       const Lexicon& lexicon);

// Ranked terms for every class: descending score, ties broken lexicographically.
std::vector<std::vector<TermStats>> tfs_rank(const TermCounts& counts, const LabelConfig& cfg);

// Top-k terms joined with "; " after collapsing duplicates; "unlabeled-<id>" when empty.
std::string label_class(std::uint32_t class_id, const std::vector<TermStats>& ranked, const LabelConfig& cfg);

}  // namespace tg
