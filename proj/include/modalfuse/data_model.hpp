#ifndef MODALFUSE_DATA_MODEL_HPP_
#define MODALFUSE_DATA_MODEL_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "modalfuse/tensor.hpp"

namespace modalfuse {

// Graded interaction level. The numeric values double as nDCG gains.
enum class Label : uint8_t { None = 0, Low = 1, High = 2 };

const char* label_name(Label l);
Label label_from_byte(uint8_t b);  // FormatError on values outside {0,1,2}

struct QueryRecord {
    std::string query_id;
    Vec embedding;  // query text embedding
};

struct ItemRecord {
    std::string item_id;
    Vec text_embedding;
    Vec image_embedding;
    std::string category_tag;  // may be empty
};

struct LabeledPair {
    std::string query_id;
    std::string item_id;
    Label y_eng = Label::None;  // engagement / desirability
    Label y_rel = Label::None;  // semantic relevance
};

struct Dataset {
    size_t dim = 0;
    std::vector<QueryRecord> queries;
    std::vector<ItemRecord> items;
    std::vector<LabeledPair> pairs;

    // id -> index maps, rebuilt by validate()
    std::unordered_map<std::string, size_t> query_index;
    std::unordered_map<std::string, size_t> item_index;

    // Checks id uniqueness, referential integrity of pairs, dim consistency
    // and finiteness, and rebuilds the index maps. Throws IntegrityError.
    void validate();
};

// Binary embedding + pairs files (magic "MMRE" / "MMPR", little-endian,
// float32 payload). Embeddings are promoted to double on load.
Dataset load_dataset(const std::string& embeddings_path, const std::string& pairs_path);
void write_dataset(const Dataset& ds, const std::string& embeddings_path,
                   const std::string& pairs_path);

// Deterministic shuffled partition of pair indices. Every pair appears
// exactly once; a trailing batch shorter than 2 is dropped (in-batch
// negatives need at least one off-diagonal entry).
std::vector<std::vector<size_t>> make_batches(const Dataset& ds, size_t batch_size,
                                              uint64_t seed);

}  // namespace modalfuse

#endif  // MODALFUSE_DATA_MODEL_HPP_
