#include "modalfuse/data_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "modalfuse/errors.hpp"
#include "modalfuse/rng.hpp"

namespace modalfuse {

namespace {

constexpr char kEmbedMagic[4] = {'M', 'M', 'R', 'E'};
constexpr char kPairsMagic[4] = {'M', 'M', 'P', 'R'};
constexpr uint32_t kFormatVersion = 1;

// Explicit little-endian encode/decode so files are byte-order independent.
void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

class Reader {
public:
    Reader(const std::string& path, const char* what) : what_(what) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError(std::string(what) + ": cannot open " + path);
        buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    const uint8_t* need(size_t n) {
        if (pos_ + n > buf_.size())
            throw FormatError(std::string(what_) + ": truncated file");
        const uint8_t* p = reinterpret_cast<const uint8_t*>(buf_.data()) + pos_;
        pos_ += n;
        return p;
    }

    uint16_t u16() {
        const uint8_t* p = need(2);
        return static_cast<uint16_t>(p[0] | (p[1] << 8));
    }
    uint32_t u32() {
        const uint8_t* p = need(4);
        return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
               (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
    }
    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | (hi << 32);
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string id_string() {
        uint16_t len = u16();
        const uint8_t* p = need(len);
        return std::string(reinterpret_cast<const char*>(p), len);
    }
    Vec embedding(size_t dim) {
        Vec v(dim);
        for (size_t i = 0; i < dim; ++i) v[i] = static_cast<double>(f32());
        return v;
    }
    bool at_end() const { return pos_ == buf_.size(); }

private:
    std::string buf_;
    size_t pos_ = 0;
    const char* what_;
};

void put_id(std::string& out, const std::string& id) {
    if (id.size() > 0xffff) throw FormatError("id longer than 65535 bytes: " + id.substr(0, 32));
    put_u16(out, static_cast<uint16_t>(id.size()));
    out.append(id);
}

void put_embedding(std::string& out, const Vec& v) {
    for (double x : v) put_f32(out, static_cast<float>(x));
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

void check_finite(const Vec& v, const std::string& owner) {
    for (double x : v)
        if (!std::isfinite(x)) throw IntegrityError("non-finite embedding entry in " + owner);
}

}  // namespace

const char* label_name(Label l) {
    switch (l) {
        case Label::None: return "None";
        case Label::Low: return "Low";
        case Label::High: return "High";
    }
    return "?";
}

Label label_from_byte(uint8_t b) {
    if (b > 2) throw FormatError("label byte out of range: " + std::to_string(b));
    return static_cast<Label>(b);
}

void Dataset::validate() {
    if (dim == 0) throw IntegrityError("dataset dim must be >= 1");
    query_index.clear();
    item_index.clear();
    query_index.reserve(queries.size());
    item_index.reserve(items.size());

    for (size_t i = 0; i < queries.size(); ++i) {
        const QueryRecord& q = queries[i];
        if (!query_index.emplace(q.query_id, i).second)
            throw IntegrityError("duplicate query id: " + q.query_id);
        if (q.embedding.size() != dim)
            throw IntegrityError("query " + q.query_id + " has dim " +
                                 std::to_string(q.embedding.size()) + ", dataset dim is " +
                                 std::to_string(dim));
        check_finite(q.embedding, "query " + q.query_id);
    }
    for (size_t i = 0; i < items.size(); ++i) {
        const ItemRecord& it = items[i];
        if (!item_index.emplace(it.item_id, i).second)
            throw IntegrityError("duplicate item id: " + it.item_id);
        if (it.text_embedding.size() != dim || it.image_embedding.size() != dim)
            throw IntegrityError("item " + it.item_id + " embedding dim mismatch");
        check_finite(it.text_embedding, "item " + it.item_id);
        check_finite(it.image_embedding, "item " + it.item_id);
    }
    for (const LabeledPair& p : pairs) {
        if (!query_index.count(p.query_id))
            throw IntegrityError("pair references unknown query id: " + p.query_id);
        if (!item_index.count(p.item_id))
            throw IntegrityError("pair references unknown item id: " + p.item_id);
    }
}

Dataset load_dataset(const std::string& embeddings_path, const std::string& pairs_path) {
    Dataset ds;

    {
        Reader r(embeddings_path, "embeddings file");
        const uint8_t* magic = r.need(4);
        if (std::memcmp(magic, kEmbedMagic, 4) != 0)
            throw FormatError("embeddings file: bad magic");
        uint32_t version = r.u32();
        if (version != kFormatVersion)
            throw FormatError("embeddings file: unsupported version " + std::to_string(version));
        ds.dim = r.u32();
        uint64_t n_queries = r.u64();
        uint64_t n_items = r.u64();
        ds.queries.reserve(n_queries);
        ds.items.reserve(n_items);
        for (uint64_t i = 0; i < n_queries; ++i) {
            QueryRecord q;
            q.query_id = r.id_string();
            q.embedding = r.embedding(ds.dim);
            ds.queries.push_back(std::move(q));
        }
        for (uint64_t i = 0; i < n_items; ++i) {
            ItemRecord it;
            it.item_id = r.id_string();
            it.text_embedding = r.embedding(ds.dim);
            it.image_embedding = r.embedding(ds.dim);
            it.category_tag = r.id_string();
            ds.items.push_back(std::move(it));
        }
        if (!r.at_end()) throw FormatError("embeddings file: trailing bytes");
    }

    {
        Reader r(pairs_path, "pairs file");
        const uint8_t* magic = r.need(4);
        if (std::memcmp(magic, kPairsMagic, 4) != 0) throw FormatError("pairs file: bad magic");
        uint32_t version = r.u32();
        if (version != kFormatVersion)
            throw FormatError("pairs file: unsupported version " + std::to_string(version));
        uint64_t n_pairs = r.u64();
        ds.pairs.reserve(n_pairs);
        for (uint64_t i = 0; i < n_pairs; ++i) {
            LabeledPair p;
            p.query_id = r.id_string();
            p.item_id = r.id_string();
            p.y_eng = label_from_byte(r.need(1)[0]);
            p.y_rel = label_from_byte(r.need(1)[0]);
            ds.pairs.push_back(std::move(p));
        }
        if (!r.at_end()) throw FormatError("pairs file: trailing bytes");
    }

    ds.validate();
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& embeddings_path,
                   const std::string& pairs_path) {
    Dataset copy = ds;  // validate rebuilds index maps; don't mutate the caller's
    copy.validate();

    std::string e;
    e.append(kEmbedMagic, 4);
    put_u32(e, kFormatVersion);
    put_u32(e, static_cast<uint32_t>(ds.dim));
    put_u64(e, ds.queries.size());
    put_u64(e, ds.items.size());
    for (const QueryRecord& q : ds.queries) {
        put_id(e, q.query_id);
        put_embedding(e, q.embedding);
    }
    for (const ItemRecord& it : ds.items) {
        put_id(e, it.item_id);
        put_embedding(e, it.text_embedding);
        put_embedding(e, it.image_embedding);
        put_id(e, it.category_tag);
    }

    std::string p;
    p.append(kPairsMagic, 4);
    put_u32(p, kFormatVersion);
    put_u64(p, ds.pairs.size());
    for (const LabeledPair& pr : ds.pairs) {
        put_id(p, pr.query_id);
        put_id(p, pr.item_id);
        p.push_back(static_cast<char>(pr.y_eng));
        p.push_back(static_cast<char>(pr.y_rel));
    }

    write_file(embeddings_path, e);
    write_file(pairs_path, p);
}

std::vector<std::vector<size_t>> make_batches(const Dataset& ds, size_t batch_size,
                                              uint64_t seed) {
    if (batch_size < 2)
        throw ConfigError("batch_size must be >= 2 (in-batch negatives need an off-diagonal)");

    std::vector<size_t> order(ds.pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<size_t>> batches;
    for (size_t start = 0; start < order.size(); start += batch_size) {
        size_t end = std::min(start + batch_size, order.size());
        if (end - start < 2) break;  // drop trailing singleton
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

}  // namespace modalfuse
