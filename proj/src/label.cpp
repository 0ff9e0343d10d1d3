#include "label.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "error.hpp"
#include "tsv.hpp"

namespace tg {

Lexicon Lexicon::english_default() {
    static const char* other[] = {
        "a", "an", "the", "of", "in", "on", "at", "to", "for", "from", "by", "with", "without", "and", "or",
        "but", "nor", "as", "is", "are", "was", "were", "be", "been", "being", "do", "does", "did", "has",
        "have", "had", "its", "it", "this", "that", "these", "those", "their", "our", "we", "they", "via",
        "into", "onto", "over", "under", "between", "among", "through", "during", "after", "before",
        "about", "against", "toward", "towards", "within", "across", "versus", "vs", "not", "no", "can",
        "may", "using", "based", "new", "how", "what", "why", "when", "where", "which", "who", "whether",
        "than", "then", "there", "here", "some", "all", "any", "each", "more", "most", "less", "least",
        "very", "also", "both", "two", "three", "one", "first", "second", "i", "ii", "iii", "s"};
    static const char* adjectives[] = {
        "cognitive", "social", "clinical", "chemical", "computational", "higher", "infectious", "political",
        "global", "local", "human", "novel", "general", "high", "low", "large", "small", "early", "late",
        "public", "molecular", "cellular", "genetic", "economic", "environmental", "international", "national",
        "chronic", "acute", "neural", "deep", "quantum", "linear", "nonlinear", "dynamic", "dynamical",
        "statistical", "empirical", "experimental", "theoretical", "numerical", "optical", "electronic",
        "mechanical", "thermal", "magnetic", "electric", "electrical", "digital", "spatial", "temporal",
        "systematic", "comparative", "organic", "inorganic", "physical", "biological", "medical", "mental",
        "urban", "rural", "educational", "academic", "primary", "secondary", "severe", "mild", "effective"};
    Lexicon lex;
    for (auto w : other) lex.set(w, PartOfSpeech::Other);
    for (auto w : adjectives) lex.set(w, PartOfSpeech::Adjective);
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon " + path.string());
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto f = tsv::split(line);
        if (f.size() < 2) throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected token<TAB>pos");
        std::string pos = f[1];
        std::transform(pos.begin(), pos.end(), pos.begin(), [](unsigned char c) { return std::toupper(c); });
        PartOfSpeech tag = PartOfSpeech::Other;
        if (pos == "N" || pos == "NOUN") tag = PartOfSpeech::Noun;
        else if (pos == "ADJ" || pos == "A" || pos == "ADJECTIVE") tag = PartOfSpeech::Adjective;
        lex.set(f[0], tag);
    }
    return lex;
}

PartOfSpeech Lexicon::tag(const std::string& token) const {
    auto it = tags_.find(token);
    return it == tags_.end() ? PartOfSpeech::Noun : it->second;
}

std::string normalize_token(const std::string& token) {
    const auto n = token.size();
    auto ends = [&](std::string_view suf) { return n > suf.size() && token.compare(n - suf.size(), suf.size(), suf) == 0; };
    if (n > 4 && ends("ies")) return token.substr(0, n - 3) + "y";
    if (n > 3 && ends("s") && !ends("ss") && !ends("us") && !ends("is")) return token.substr(0, n - 1);
    return token;
}

std::string term_key(const std::vector<std::string>& tokens) {
    std::string key;
    for (const auto& t : tokens) {
        if (!key.empty()) key.push_back(' ');
        key += normalize_token(t);
    }
    return key;
}

std::vector<std::vector<std::string>> extract_terms(const std::vector<std::string>& title_tokens,
                                                    const Lexicon& lexicon) {
    std::vector<std::vector<std::string>> terms;
    const std::size_t n = title_tokens.size();
    std::size_t i = 0;
    while (i < n) {
        if (lexicon.tag(title_tokens[i]) == PartOfSpeech::Other) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && lexicon.tag(title_tokens[j]) != PartOfSpeech::Other) ++j;
        // Run [i, j): every sub-run ending with a noun.
        for (std::size_t end = i; end < j; ++end) {
            if (lexicon.tag(title_tokens[end]) != PartOfSpeech::Noun) continue;
            for (std::size_t start = i; start <= end; ++start)
                terms.emplace_back(title_tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                   title_tokens.begin() + static_cast<std::ptrdiff_t>(end + 1));
        }
        i = j;
    }
    return terms;
}

void LabelConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
    if (top_k < 1) throw ArgumentError("top_k must be positive");
}

double tfs_score(std::int64_t class_freq, std::int64_t corpus_freq, double alpha) {
    if (class_freq <= 0 || corpus_freq < class_freq) throw ArgumentError("need 0 < class_freq <= corpus_freq");
    const double spec = static_cast<double>(class_freq) / static_cast<double>(corpus_freq);
    return std::pow(static_cast<double>(class_freq), alpha) * std::pow(spec, 1.0 - alpha);
}

TermCounts count_terms(const std::vector<std::vector<std::string>>& title_tokens_per_item,
                       const std::vector<std::uint32_t>& class_of_item, std::uint32_t n_classes,
                       const Lexicon& lexicon) {
    if (title_tokens_per_item.size() != class_of_item.size()) throw ArgumentError("item/class size mismatch");
    TermCounts tc;
    tc.per_class.resize(n_classes);
    std::map<std::string, std::map<std::string, std::int64_t>> surface;
    for (std::size_t i = 0; i < title_tokens_per_item.size(); ++i) {
        const auto c = class_of_item[i];
        if (c >= n_classes) throw ArgumentError("class id out of range");
        for (const auto& term : extract_terms(title_tokens_per_item[i], lexicon)) {
            auto key = term_key(term);
            std::string form;
            for (const auto& t : term) form += (form.empty() ? "" : " ") + t;
            ++tc.per_class[c][key];
            ++tc.corpus[key];
            ++surface[key][form];
        }
    }
    for (auto& [key, forms] : surface) {
        std::string best;
        std::int64_t bc = -1;
        for (auto& [form, cnt] : forms)
            if (cnt > bc) {
                bc = cnt;
                best = form;
            }
        tc.display[key] = best;
    }
    return tc;
}

std::vector<std::vector<TermStats>> tfs_rank(const TermCounts& counts, const LabelConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<TermStats>> ranked(counts.per_class.size());
    for (std::size_t c = 0; c < counts.per_class.size(); ++c) {
        auto& out = ranked[c];
        for (const auto& [key, cf] : counts.per_class[c]) {
            TermStats s;
            auto d = counts.display.find(key);
            s.term = d == counts.display.end() ? key : d->second;
            s.class_freq = cf;
            s.corpus_freq = counts.corpus.at(key);
            s.specificity = static_cast<double>(cf) / static_cast<double>(s.corpus_freq);
            s.score = tfs_score(cf, s.corpus_freq, cfg.alpha);
            out.push_back(std::move(s));
        }
        std::sort(out.begin(), out.end(), [](const TermStats& a, const TermStats& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.term < b.term;
        });
    }
    return ranked;
}

std::string label_class(std::uint32_t class_id, const std::vector<TermStats>& ranked, const LabelConfig& cfg) {
    cfg.validate();
    std::string label;
    std::set<std::string> used;
    int taken = 0;
    for (const auto& t : ranked) {
        if (taken >= cfg.top_k) break;
        auto key = term_key(tsv::split(t.term, ' '));
        if (!used.insert(key).second) continue;
        if (!label.empty()) label += "; ";
        label += t.term;
        ++taken;
    }
    if (label.empty()) return "unlabeled-" + std::to_string(class_id);
    return label;
}

}  // namespace tg
