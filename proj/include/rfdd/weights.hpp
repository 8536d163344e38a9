#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfdd {

// Malformed container contents (bad magic, truncation, duplicates).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failures (missing file, failed write).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WeightArray {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t size() const { return data.size(); }
};

inline std::string dims_str(std::span<const std::uint32_t> dims) {
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(dims[i]);
    }
    return s + ")";
}

// Ordered map from dotted tensor names to flat float arrays. Iteration and
// serialization follow lexicographic name order.
class WeightStore {
public:
    bool has(const std::string& name) const { return entries_.count(name) != 0; }

    const WeightArray& get(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) {
            throw std::invalid_argument("weight '" + name + "' not found in store");
        }
        return it->second;
    }

    // Shape-checked lookup; the expected dims come from the module graph.
    const WeightArray& get(const std::string& name,
                           std::initializer_list<std::uint32_t> expected_dims) const {
        const WeightArray& arr = get(name);
        bool match = arr.dims.size() == expected_dims.size();
        if (match) {
            std::size_t i = 0;
            for (std::uint32_t d : expected_dims) {
                if (arr.dims[i++] != d) {
                    match = false;
                    break;
                }
            }
        }
        if (!match) {
            throw std::invalid_argument(
                "weight '" + name + "': expected dims " +
                dims_str(std::vector<std::uint32_t>(expected_dims)) + ", found " +
                dims_str(arr.dims));
        }
        return arr;
    }

    std::span<const float> span(const std::string& name,
                                std::initializer_list<std::uint32_t> expected_dims) const {
        return get(name, expected_dims).data;
    }

    void put(const std::string& name, std::vector<std::uint32_t> dims, std::vector<float> data) {
        std::size_t expected = 1;
        for (std::uint32_t d : dims) expected *= d;
        if (dims.empty() || expected != data.size()) {
            throw std::invalid_argument("weight '" + name + "': dims " + dims_str(dims) +
                                        " do not describe " + std::to_string(data.size()) +
                                        " values");
        }
        entries_[name] = WeightArray{std::move(dims), std::move(data)};
    }

    std::size_t count() const { return entries_.size(); }

    std::size_t total_parameters() const {
        std::size_t n = 0;
        for (const auto& [name, arr] : entries_) n += arr.size();
        return n;
    }

    const std::map<std::string, WeightArray>& entries() const { return entries_; }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool operator==(const WeightStore& other) const {
        if (entries_.size() != other.entries_.size()) return false;
        auto a = entries_.begin();
        auto b = other.entries_.begin();
        for (; a != entries_.end(); ++a, ++b) {
            if (a->first != b->first || a->second.dims != b->second.dims) return false;
            if (a->second.data.size() != b->second.data.size()) return false;
            for (std::size_t i = 0; i < a->second.data.size(); ++i) {
                // bitwise comparison, the container round trip is exact
                if (std::bit_cast<std::uint32_t>(a->second.data[i]) !=
                    std::bit_cast<std::uint32_t>(b->second.data[i])) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    std::map<std::string, WeightArray> entries_;
};

// Same names and dims, every value set to zero. Zeroed expert weights make
// each FDD block an exact identity and the ACGF gates exactly one.
inline WeightStore zeroed(WeightStore store) {
    for (auto& [name, arr] : store) {
        std::fill(arr.data.begin(), arr.data.end(), 0.0f);
    }
    return store;
}

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size()) {
            throw FormatError("weight container: truncated " + std::string(what) +
                              " at byte offset " + std::to_string(pos));
        }
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint8_t>(buf[pos]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
        }
        pos += 4;
        return v;
    }
};

}  // namespace detail

inline constexpr char kWeightMagic[4] = {'R', 'F', 'D', 'D'};
inline constexpr std::uint32_t kWeightVersion = 1;

// Serializes in sorted-name order. Layout per entry:
//   name_len:u16  name:bytes  ndim:u8  dims:ndim*u32  data:prod(dims)*f32, all little-endian.
inline void save_weights(const WeightStore& store, const std::filesystem::path& path) {
    std::string out;
    out.append(kWeightMagic, 4);
    detail::put_u32(out, kWeightVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(store.count()));
    for (const auto& [name, arr] : store.entries()) {
        if (name.size() > 0xFFFF) {
            throw std::invalid_argument("weight '" + name.substr(0, 32) + "...': name too long");
        }
        if (arr.dims.size() > 0xFF) {
            throw std::invalid_argument("weight '" + name + "': too many dims");
        }
        for (float v : arr.data) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("weight '" + name + "': non-finite value");
            }
        }
        detail::put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.append(name);
        out.push_back(static_cast<char>(arr.dims.size()));
        for (std::uint32_t d : arr.dims) detail::put_u32(out, d);
        for (float v : arr.data) detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
    }

    // write-temp-then-rename keeps partially written files invisible
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " +
                      ec.message());
    }
}

inline WeightStore load_weights(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) {
        throw IoError("read failed for '" + path.string() + "'");
    }

    detail::Reader r{buf};
    r.need(4, "magic");
    if (buf.compare(0, 4, kWeightMagic, 4) != 0) {
        throw FormatError("weight container: bad magic at byte offset 0");
    }
    r.pos = 4;
    const std::uint32_t version = r.u32("version");
    if (version != kWeightVersion) {
        throw FormatError("weight container: unsupported version " + std::to_string(version) +
                          " at byte offset 4");
    }
    const std::uint32_t count = r.u32("entry count");

    WeightStore store;
    for (std::uint32_t e = 0; e < count; ++e) {
        const std::uint16_t name_len = r.u16("name length");
        r.need(name_len, "name");
        std::string name = buf.substr(r.pos, name_len);
        r.pos += name_len;
        if (store.has(name)) {
            throw FormatError("weight container: duplicate tensor name '" + name + "'");
        }
        const std::uint8_t ndim = r.u8("ndim");
        if (ndim == 0) {
            throw FormatError("weight container: entry '" + name + "' has zero dims at byte offset " +
                              std::to_string(r.pos - 1));
        }
        std::vector<std::uint32_t> dims(ndim);
        std::size_t n = 1;
        for (std::uint8_t d = 0; d < ndim; ++d) {
            dims[d] = r.u32("dims");
            n *= dims[d];
        }
        r.need(n * 4, "tensor data");
        std::vector<float> data(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) {
                bits |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[r.pos + 4 * i + b]))
                        << (8 * b);
            }
            data[i] = std::bit_cast<float>(bits);
        }
        r.pos += n * 4;
        store.put(name, std::move(dims), std::move(data));
    }
    if (r.pos != buf.size()) {
        throw FormatError("weight container: " + std::to_string(buf.size() - r.pos) +
                          " trailing bytes at byte offset " + std::to_string(r.pos));
    }
    return store;
}

}  // namespace rfdd
