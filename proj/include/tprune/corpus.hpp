#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "date.hpp"
#include "error.hpp"
#include "time_window.hpp"
#include "tokenize.hpp"

namespace tprune {

/// A time-stamped document: bag of words plus a bag of time windows.
struct Document {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::vector<TimeWindow> time_part;

    friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
    std::vector<Document> documents;
    std::string day_epoch = "1970-01-01";
    /// Records that could not be turned into a document.
    std::size_t malformed = 0;
    std::vector<std::string> diagnostics;
};

enum class CorpusFormat { jsonl, trec_sgml };

inline CorpusFormat parse_corpus_format(std::string_view name)
{
    if (name == "jsonl") {
        return CorpusFormat::jsonl;
    }
    if (name == "trec" || name == "trec-sgml") {
        return CorpusFormat::trec_sgml;
    }
    throw invalid_argument_error("unknown corpus format '" + std::string(name) + "'");
}

namespace detail {

inline Day json_day(const nlohmann::json& v)
{
    if (v.is_string()) {
        return parse_iso_date(v.get<std::string>());
    }
    if (v.is_number_integer()) {
        return v.get<Day>();
    }
    throw parse_error("time bound must be an ISO date or a day number");
}

class CorpusBuilder {
public:
    explicit CorpusBuilder(const TokenizerConfig& cfg) : m_cfg(cfg) {}

    void add(std::string doc_id, std::string_view text, std::vector<TimeWindow> times)
    {
        if (doc_id.empty()) {
            reject("record without document id");
            return;
        }
        auto tokens = tokenize(text, m_cfg);
        if (tokens.empty()) {
            reject("document '" + doc_id + "' has no indexable tokens");
            return;
        }
        if (!m_seen.insert(doc_id).second) {
            reject("duplicate document id '" + doc_id + "'");
            return;
        }
        m_corpus.documents.push_back({std::move(doc_id), std::move(tokens), std::move(times)});
    }

    void reject(std::string why)
    {
        ++m_corpus.malformed;
        m_corpus.diagnostics.push_back(std::move(why));
    }

    Corpus finish() &&
    {
        if (m_corpus.documents.empty()) {
            throw empty_corpus_error("corpus contains no parseable documents");
        }
        return std::move(m_corpus);
    }

private:
    TokenizerConfig m_cfg;
    Corpus m_corpus;
    std::unordered_set<std::string> m_seen;
};

inline std::string strip_tags(std::string_view s)
{
    std::string out;
    bool in_tag = false;
    for (char c : s) {
        if (c == '<') {
            in_tag = true;
            out.push_back(' ');
        } else if (c == '>') {
            in_tag = false;
        } else if (!in_tag) {
            out.push_back(c);
        }
    }
    return out;
}

inline std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Inner text of every <TAG>...</TAG> block in `doc`, concatenated.
inline std::string tag_contents(std::string_view doc, std::string_view tag, bool* found = nullptr)
{
    std::string open = "<" + std::string(tag) + ">";
    std::string close = "</" + std::string(tag) + ">";
    std::string out;
    std::size_t pos = 0;
    bool any = false;
    while ((pos = doc.find(open, pos)) != std::string_view::npos) {
        auto start = pos + open.size();
        auto end = doc.find(close, start);
        if (end == std::string_view::npos) {
            break;
        }
        if (any) {
            out.push_back(' ');
        }
        out.append(doc.substr(start, end - start));
        any = true;
        pos = end + close.size();
    }
    if (found != nullptr) {
        *found = any;
    }
    return out;
}

inline int month_from_name(std::string name)
{
    static const char* names[] = {"january", "february", "march",     "april",   "may",      "june",
                                  "july",    "august",   "september", "october", "november", "december"};
    for (auto& c : name) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (int i = 0; i < 12; ++i) {
        if (name == names[i]) {
            return i + 1;
        }
    }
    return 0;
}

/// Publication date from a TREC <DATE> field ("January 1, 1989, Sunday, ...",
/// ISO dates, or YYMMDD), falling back to an LA-style DOCNO (LAmmddyy-nnnn).
inline std::optional<Day> trec_publication_date(const std::string& date_text, const std::string& docno)
{
    std::smatch m;
    static const std::regex iso(R"((\d{4})-(\d{2})-(\d{2}))");
    static const std::regex named(R"(([A-Za-z]+)\s+(\d{1,2}),\s*(\d{4}))");
    static const std::regex yymmdd(R"(^\s*(\d{2})(\d{2})(\d{2})\s*$)");
    static const std::regex la_docno(R"(^LA(\d{2})(\d{2})(\d{2})-)");
    try {
        if (std::regex_search(date_text, m, iso)) {
            return day_number(std::stoi(m[1]), std::stoul(m[2]), std::stoul(m[3]));
        }
        if (std::regex_search(date_text, m, named)) {
            if (int month = month_from_name(m[1]); month > 0) {
                return day_number(std::stoi(m[3]), static_cast<unsigned>(month), std::stoul(m[2]));
            }
        }
        if (std::regex_search(date_text, m, yymmdd)) {
            return day_number(1900 + std::stoi(m[1]), std::stoul(m[2]), std::stoul(m[3]));
        }
        if (std::regex_search(docno, m, la_docno)) {
            return day_number(1900 + std::stoi(m[3]), std::stoul(m[1]), std::stoul(m[2]));
        }
    } catch (const parse_error&) {
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

/// One JSON object per line:
/// {"id": "...", "text": "...", "time": [[b_lo, b_hi, e_lo, e_hi], ...]}.
inline Corpus read_jsonl_corpus(std::istream& in, const TokenizerConfig& cfg = {})
{
    detail::CorpusBuilder builder(cfg);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) {
            continue;
        }
        try {
            auto rec = nlohmann::json::parse(line);
            if (!rec.is_object() || !rec.contains("id") || !rec.contains("text")) {
                throw parse_error("missing id or text");
            }
            std::vector<TimeWindow> times;
            if (auto it = rec.find("time"); it != rec.end() && !it->is_null()) {
                for (const auto& w : *it) {
                    if (!w.is_array() || w.size() != 4) {
                        throw parse_error("time window must have four bounds");
                    }
                    TimeWindow tw{detail::json_day(w[0]),
                                  detail::json_day(w[1]),
                                  detail::json_day(w[2]),
                                  detail::json_day(w[3])};
                    validate(tw);
                    times.push_back(tw);
                }
            }
            builder.add(rec.at("id").get<std::string>(), rec.at("text").get<std::string>(), std::move(times));
        } catch (const std::exception& e) {
            builder.reject("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return std::move(builder).finish();
}

/// TREC SGML: <DOC><DOCNO>..</DOCNO><DATE>..</DATE><TEXT>..</TEXT></DOC>.
/// The publication date becomes a single-day window.
inline Corpus read_trec_corpus(std::istream& in, const TokenizerConfig& cfg = {})
{
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    detail::CorpusBuilder builder(cfg);
    std::size_t pos = 0;
    while ((pos = data.find("<DOC>", pos)) != std::string::npos) {
        auto end = data.find("</DOC>", pos);
        if (end == std::string::npos) {
            builder.reject("unterminated <DOC> at byte " + std::to_string(pos));
            break;
        }
        std::string_view doc(data.data() + pos + 5, end - pos - 5);
        pos = end + 6;
        bool has_docno = false;
        auto docno = detail::trim(detail::tag_contents(doc, "DOCNO", &has_docno));
        if (!has_docno || docno.empty()) {
            builder.reject("document without DOCNO");
            continue;
        }
        auto date_text = detail::strip_tags(detail::tag_contents(doc, "DATE"));
        std::vector<TimeWindow> times;
        if (auto day = detail::trec_publication_date(date_text, docno)) {
            times.push_back(TimeWindow::on(*day));
        }
        builder.add(docno, detail::strip_tags(detail::tag_contents(doc, "TEXT")), std::move(times));
    }
    return std::move(builder).finish();
}

inline Corpus parse_corpus(const std::string& path, CorpusFormat format, const TokenizerConfig& cfg = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open corpus file '" + path + "'");
    }
    return format == CorpusFormat::jsonl ? read_jsonl_corpus(in, cfg) : read_trec_corpus(in, cfg);
}

inline nlohmann::json time_part_json(const std::vector<TimeWindow>& windows)
{
    auto arr = nlohmann::json::array();
    for (const auto& w : windows) {
        arr.push_back({format_iso_date(w.b_lo), format_iso_date(w.b_hi), format_iso_date(w.e_lo),
                       format_iso_date(w.e_hi)});
    }
    return arr;
}

/// Writes the canonical JSONL form; text is the token sequence.
inline void write_jsonl_corpus(std::ostream& out, const Corpus& corpus)
{
    for (const auto& d : corpus.documents) {
        nlohmann::json rec;
        rec["id"] = d.doc_id;
        rec["text"] = join_tokens(d.tokens);
        rec["time"] = time_part_json(d.time_part);
        out << rec.dump() << '\n';
    }
}

inline void write_jsonl_corpus(const std::string& path, const Corpus& corpus)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot write corpus file '" + path + "'");
    }
    write_jsonl_corpus(out, corpus);
}

}  // namespace tprune
