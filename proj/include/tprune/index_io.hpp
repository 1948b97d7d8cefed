#pragma once

// On-disk index layout (all integers little-endian):
//
//   "TPIX"  u32 version  u8 flags
//   varint n_docs
//   per doc:   string name, varint |d|, varint n_windows, 4 zigzag varints per window
//   varint total_len
//   varint n_terms
//   per term (ascending):  string term, varint df, varint ctf, varint n_postings,
//                          varint doc gaps (first gap is the doc id itself),
//                          varint tf values
//   u32 crc32 of every preceding byte
//
// Strings are a varint byte length followed by the bytes. Flags: bit 0 stop
// words removed, bit 1 statistics frozen by pruning.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <zlib.h>

#include "error.hpp"
#include "index.hpp"

namespace tprune {

inline constexpr std::uint32_t index_format_version = 1;
inline constexpr std::string_view index_magic = "TPIX";

namespace detail {

class ByteWriter {
public:
    void varint(std::uint64_t v)
    {
        while (v >= 0x80) {
            m_buf.push_back(static_cast<char>((v & 0x7F) | 0x80));
            v >>= 7;
        }
        m_buf.push_back(static_cast<char>(v));
    }

    void zigzag(std::int64_t v) { varint((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63)); }

    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            m_buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
    }

    void byte(std::uint8_t b) { m_buf.push_back(static_cast<char>(b)); }

    void raw(std::string_view s) { m_buf.append(s); }

    void string(std::string_view s)
    {
        varint(s.size());
        raw(s);
    }

    std::string& buffer() { return m_buf; }

private:
    std::string m_buf;
};

class ByteReader {
public:
    ByteReader(std::string_view data) : m_data(data) {}

    std::uint64_t varint()
    {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            auto b = static_cast<std::uint8_t>(next());
            v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if ((b & 0x80) == 0) {
                return v;
            }
        }
        throw format_error(format_error::kind::truncated, "varint too long");
    }

    std::int64_t zigzag()
    {
        auto u = varint();
        return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
    }

    std::uint32_t u32()
    {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(next())) << (8 * i);
        }
        return v;
    }

    std::uint8_t byte() { return static_cast<std::uint8_t>(next()); }

    std::string string()
    {
        auto n = varint();
        if (n > m_data.size() - m_pos) {
            throw format_error(format_error::kind::truncated, "string runs past end of index");
        }
        std::string s(m_data.substr(m_pos, n));
        m_pos += n;
        return s;
    }

    [[nodiscard]] bool done() const { return m_pos == m_data.size(); }

private:
    char next()
    {
        if (m_pos >= m_data.size()) {
            throw format_error(format_error::kind::truncated, "unexpected end of index data");
        }
        return m_data[m_pos++];
    }

    std::string_view m_data;
    std::size_t m_pos = 0;
};

inline std::uint32_t crc32_of(std::string_view bytes)
{
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace detail

inline std::string encode_index(const InvertedIndex& idx)
{
    detail::ByteWriter w;
    w.raw(index_magic);
    w.u32(index_format_version);
    w.byte(static_cast<std::uint8_t>((idx.stopwords_removed ? 1 : 0) | (idx.stats_frozen ? 2 : 0)));
    w.varint(idx.n_docs());
    for (std::size_t d = 0; d < idx.n_docs(); ++d) {
        w.string(idx.doc_names[d]);
        w.varint(idx.stats.doc_len[d]);
        w.varint(idx.doc_times[d].size());
        for (const auto& tw : idx.doc_times[d]) {
            w.zigzag(tw.b_lo);
            w.zigzag(tw.b_hi);
            w.zigzag(tw.e_lo);
            w.zigzag(tw.e_hi);
        }
    }
    w.varint(idx.stats.total_len);
    w.varint(idx.lists.size());
    for (const auto& [term, pl] : idx.lists) {
        const auto ts = idx.stats.terms.at(term);
        w.string(term);
        w.varint(ts.df);
        w.varint(ts.ctf);
        w.varint(pl.size());
        DocId prev = 0;
        for (std::size_t i = 0; i < pl.postings.size(); ++i) {
            auto doc = pl.postings[i].doc;
            w.varint(i == 0 ? doc : doc - prev);
            prev = doc;
        }
        for (const auto& p : pl.postings) {
            w.varint(p.tf);
        }
    }
    auto& buf = w.buffer();
    auto crc = detail::crc32_of(buf);
    w.u32(crc);
    return std::move(buf);
}

inline InvertedIndex decode_index(std::string_view bytes)
{
    if (bytes.size() < index_magic.size() + 4 + 1 + 4) {
        throw format_error(format_error::kind::checksum, "index file too short to hold a checksum");
    }
    if (bytes.substr(0, index_magic.size()) != index_magic) {
        throw format_error(format_error::kind::bad_magic, "not an index file (bad magic bytes)");
    }
    detail::ByteReader header(bytes.substr(index_magic.size(), 4));
    if (auto v = header.u32(); v != index_format_version) {
        throw format_error(format_error::kind::version_mismatch,
                           "index format version " + std::to_string(v) + " not supported (expected "
                               + std::to_string(index_format_version) + ")");
    }
    auto body = bytes.substr(0, bytes.size() - 4);
    detail::ByteReader trailer(bytes.substr(bytes.size() - 4));
    if (trailer.u32() != detail::crc32_of(body)) {
        throw format_error(format_error::kind::checksum, "index checksum mismatch (file corrupt or truncated)");
    }

    detail::ByteReader r(body.substr(index_magic.size() + 4));
    InvertedIndex idx;
    auto flags = r.byte();
    idx.stopwords_removed = (flags & 1) != 0;
    idx.stats_frozen = (flags & 2) != 0;
    auto n_docs = r.varint();
    for (std::uint64_t d = 0; d < n_docs; ++d) {
        idx.doc_names.push_back(r.string());
        idx.stats.doc_len.push_back(static_cast<std::uint32_t>(r.varint()));
        auto n_windows = r.varint();
        std::vector<TimeWindow> ws;
        for (std::uint64_t k = 0; k < n_windows; ++k) {
            TimeWindow tw;
            tw.b_lo = static_cast<Day>(r.zigzag());
            tw.b_hi = static_cast<Day>(r.zigzag());
            tw.e_lo = static_cast<Day>(r.zigzag());
            tw.e_hi = static_cast<Day>(r.zigzag());
            ws.push_back(tw);
        }
        idx.doc_times.push_back(std::move(ws));
    }
    idx.stats.n_docs = n_docs;
    idx.stats.total_len = r.varint();
    idx.stats.avgdl = n_docs == 0 ? 0.0 : static_cast<double>(idx.stats.total_len) / static_cast<double>(n_docs);
    auto n_terms = r.varint();
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        PostingList pl;
        pl.term = r.string();
        TermStats ts;
        ts.df = static_cast<std::uint32_t>(r.varint());
        ts.ctf = r.varint();
        auto n = r.varint();
        pl.postings.resize(n);
        DocId prev = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            auto gap = static_cast<DocId>(r.varint());
            prev = i == 0 ? gap : prev + gap;
            pl.postings[i].doc = prev;
        }
        for (auto& p : pl.postings) {
            p.tf = static_cast<std::uint32_t>(r.varint());
        }
        idx.stats.terms.emplace(pl.term, ts);
        auto key = pl.term;
        idx.lists.emplace(std::move(key), std::move(pl));
    }
    if (!r.done()) {
        throw format_error(format_error::kind::truncated, "trailing bytes after index payload");
    }
    return idx;
}

inline void write_index(const InvertedIndex& idx, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot write index file '" + path + "'");
    }
    auto bytes = encode_index(idx);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw io_error("failed writing index file '" + path + "'");
    }
}

inline InvertedIndex read_index(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open index file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return decode_index(ss.str());
}

}  // namespace tprune
