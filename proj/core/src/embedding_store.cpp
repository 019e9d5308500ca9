#include "neuralrank/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "neuralrank/error.hpp"

namespace neuralrank {

namespace {

using json = nlohmann::json;

static_assert(std::numeric_limits<float>::is_iec559, "NRNK payload requires IEEE-754 float32");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(value >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::uint32_t value = 0;
    for (int k = 0; k < 4; ++k) value |= static_cast<std::uint32_t>(bytes[offset + k]) << (8 * k);
    return value;
}

template <typename T>
T require(const json& header, const char* key) {
    auto it = header.find(key);
    if (it == header.end()) throw FormatError(std::string("NRNK header missing key '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("NRNK header key '") + key + "' has the wrong type");
    }
}

std::int64_t require_count(const json& header, const char* key) {
    auto it = header.find(key);
    if (it == header.end()) throw FormatError(std::string("NRNK header missing key '") + key + "'");
    if (!it->is_number_integer()) throw FormatError(std::string("NRNK header key '") + key + "' must be an integer");
    auto value = it->get<std::int64_t>();
    if (value < 0) throw FormatError(std::string("NRNK header key '") + key + "' must be non-negative");
    return value;
}

}  // namespace

bool EmbeddingSet::operator==(const EmbeddingSet& other) const {
    if (model_id != other.model_id || layer_id != other.layer_id || dataset_id != other.dataset_id ||
        labels != other.labels || data.rows() != other.data.rows() || data.cols() != other.data.cols())
        return false;
    // Bitwise so that round-trip checks are exact even for -0.0.
    return data.size() == 0 ||
           std::memcmp(data.data(), other.data.data(), sizeof(float) * static_cast<std::size_t>(data.size())) == 0;
}

void validate(const EmbeddingSet& set) {
    if (set.rows() < 2) throw ValidationError("rows: need at least 2 samples, got " + std::to_string(set.rows()));
    if (set.dims() < 1) throw ValidationError("dims: need at least 1 dimension");
    if (static_cast<std::int64_t>(set.labels.size()) != set.rows())
        throw ValidationError("labels: length " + std::to_string(set.labels.size()) + " does not match rows " +
                              std::to_string(set.rows()));
    std::set<ClassId> distinct(set.labels.begin(), set.labels.end());
    if (distinct.size() < 2) throw ValidationError("labels: fewer than 2 classes");
    for (std::int64_t r = 0; r < set.rows(); ++r)
        for (std::int64_t c = 0; c < set.dims(); ++c)
            if (!std::isfinite(set.data(r, c)))
                throw ValidationError("data: non-finite value at row " + std::to_string(r) + ", column " +
                                      std::to_string(c));
}

std::vector<std::uint8_t> encode_embedding_set(const EmbeddingSet& set) {
    validate(set);
    json header = {
        {"model_id", set.model_id},
        {"layer_id", set.layer_id},
        {"dataset_id", set.dataset_id},
        {"rows", set.rows()},
        {"dims", set.dims()},
        {"dtype", "f32le"},
        {"labels", set.labels},
    };
    const std::string text = header.dump();
    if (text.size() > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("labels: header too large");

    std::vector<std::uint8_t> out;
    out.reserve(kNrnkPreambleSize + text.size() + 4 * static_cast<std::size_t>(set.data.size()));
    out.insert(out.end(), std::begin(kNrnkMagic), std::end(kNrnkMagic));
    put_u32(out, kNrnkVersion);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());
    for (std::int64_t r = 0; r < set.rows(); ++r)
        for (std::int64_t c = 0; c < set.dims(); ++c) put_u32(out, std::bit_cast<std::uint32_t>(set.data(r, c)));
    return out;
}

EmbeddingSet decode_embedding_set(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kNrnkMagic, 4) != 0)
        throw FormatError("bad magic: not an NRNK file");
    if (bytes.size() < kNrnkPreambleSize)
        throw TruncationError("truncated preamble: " + std::to_string(bytes.size()) + " of 12 bytes", bytes.size());

    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kNrnkVersion)
        throw FormatError("unsupported NRNK version " + std::to_string(version) + " (expected 1)");

    const std::uint64_t header_len = get_u32(bytes, 8);
    const std::uint64_t header_end = kNrnkPreambleSize + header_len;
    if (header_end > bytes.size())
        throw TruncationError("truncated header: declared " + std::to_string(header_len) + " bytes, file ends at offset " +
                                  std::to_string(bytes.size()),
                              bytes.size());

    json header;
    try {
        header = json::parse(bytes.begin() + kNrnkPreambleSize, bytes.begin() + static_cast<std::ptrdiff_t>(header_end));
    } catch (const json::exception& e) {
        throw FormatError(std::string("NRNK header is not valid JSON: ") + e.what());
    }
    if (!header.is_object()) throw FormatError("NRNK header must be a JSON object");

    EmbeddingSet set;
    set.model_id = require<std::string>(header, "model_id");
    set.layer_id = require<std::string>(header, "layer_id");
    set.dataset_id = require<std::string>(header, "dataset_id");
    const auto dtype = require<std::string>(header, "dtype");
    if (dtype != "f32le") throw FormatError("unsupported dtype '" + dtype + "' (expected f32le)");
    const std::int64_t rows = require_count(header, "rows");
    const std::int64_t dims = require_count(header, "dims");

    auto labels_it = header.find("labels");
    if (labels_it == header.end()) throw FormatError("NRNK header missing key 'labels'");
    if (!labels_it->is_array()) throw FormatError("NRNK header key 'labels' must be an array");
    if (static_cast<std::int64_t>(labels_it->size()) != rows)
        throw ValidationError("labels: length " + std::to_string(labels_it->size()) + " does not match rows " +
                              std::to_string(rows));
    set.labels.reserve(labels_it->size());
    for (const auto& label : *labels_it) {
        if (!label.is_number_integer() || label.get<std::int64_t>() < 0 ||
            label.get<std::int64_t>() > std::numeric_limits<ClassId>::max())
            throw ValidationError("labels: class ids must be non-negative 32-bit integers");
        set.labels.push_back(label.get<ClassId>());
    }

    const std::uint64_t max_cells = std::numeric_limits<std::uint64_t>::max() / 4;
    if (rows != 0 && static_cast<std::uint64_t>(dims) > max_cells / static_cast<std::uint64_t>(rows))
        throw FormatError("rows * dims overflows");
    const std::uint64_t expected = 4ULL * static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(dims);
    const std::uint64_t remaining = bytes.size() - header_end;
    if (remaining < expected)
        throw TruncationError("truncated payload: expected " + std::to_string(expected) + " bytes after offset " +
                                  std::to_string(header_end) + ", found " + std::to_string(remaining) +
                                  " (data ends at byte offset " + std::to_string(bytes.size()) + ")",
                              bytes.size());
    if (remaining > expected)
        throw TruncationError("trailing bytes: payload should end at byte offset " +
                                  std::to_string(header_end + expected) + ", file has " +
                                  std::to_string(remaining - expected) + " extra",
                              header_end + expected);

    set.data.resize(rows, dims);
    std::size_t offset = header_end;
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < dims; ++c, offset += 4)
            set.data(r, c) = std::bit_cast<float>(get_u32(bytes, offset));
    }
    validate(set);
    return set;
}

void write_embedding_set(const EmbeddingSet& set, std::ostream& sink) {
    const auto bytes = encode_embedding_set(set);
    sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!sink) throw IoError("failed to write NRNK bytes");
}

EmbeddingSet read_embedding_set(std::istream& source) {
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    if (source.bad()) throw IoError("failed to read NRNK bytes");
    return decode_embedding_set(bytes);
}

void write_embedding_file(const EmbeddingSet& set, const std::filesystem::path& path) {
    const auto bytes = encode_embedding_set(set);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed to write '" + path.string() + "'");
}

EmbeddingSet read_embedding_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_embedding_set(in);
}

}  // namespace neuralrank
