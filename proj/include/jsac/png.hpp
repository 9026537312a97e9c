// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal 8-bit RGB PNG writer (zlib for the IDAT stream and CRCs).

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <zlib.h>

#include "jsac/common.hpp"

namespace jsac {

class Image {
public:
    Image(std::size_t width, std::size_t height, std::uint8_t r = 255, std::uint8_t g = 255,
          std::uint8_t b = 255)
        : w_(width), h_(height), px_(width * height * 3) {
        for (std::size_t i = 0; i < w_ * h_; ++i) {
            px_[3 * i] = r;
            px_[3 * i + 1] = g;
            px_[3 * i + 2] = b;
        }
    }

    std::size_t width() const { return w_; }
    std::size_t height() const { return h_; }

    void set(long long x, long long y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        if (x < 0 || y < 0 || x >= static_cast<long long>(w_) || y >= static_cast<long long>(h_))
            return;
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * w_ + static_cast<std::size_t>(x));
        px_[i] = r;
        px_[i + 1] = g;
        px_[i + 2] = b;
    }

    void write(const std::string& path) const {
        std::vector<std::uint8_t> raw;
        raw.reserve(h_ * (w_ * 3 + 1));
        for (std::size_t y = 0; y < h_; ++y) {
            raw.push_back(0);  // filter: none
            raw.insert(raw.end(), px_.begin() + static_cast<long>(3 * y * w_),
                       px_.begin() + static_cast<long>(3 * (y + 1) * w_));
        }
        uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
        std::vector<std::uint8_t> comp(comp_len);
        require(compress(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size())) ==
                    Z_OK,
                "png: compression failed");
        comp.resize(comp_len);

        std::ofstream f(path, std::ios::binary);
        require(f.good(), "png: cannot open " + path);
        static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
        f.write(reinterpret_cast<const char*>(sig), 8);

        std::uint8_t ihdr[13];
        put_u32(ihdr, static_cast<std::uint32_t>(w_));
        put_u32(ihdr + 4, static_cast<std::uint32_t>(h_));
        ihdr[8] = 8;   // bit depth
        ihdr[9] = 2;   // RGB
        ihdr[10] = ihdr[11] = ihdr[12] = 0;
        write_chunk(f, "IHDR", ihdr, 13);
        write_chunk(f, "IDAT", comp.data(), comp.size());
        write_chunk(f, "IEND", nullptr, 0);
    }

private:
    static void put_u32(std::uint8_t* p, std::uint32_t v) {
        p[0] = static_cast<std::uint8_t>(v >> 24);
        p[1] = static_cast<std::uint8_t>(v >> 16);
        p[2] = static_cast<std::uint8_t>(v >> 8);
        p[3] = static_cast<std::uint8_t>(v);
    }

    static void write_chunk(std::ofstream& f, const char* type, const std::uint8_t* data,
                            std::size_t len) {
        std::uint8_t head[8];
        put_u32(head, static_cast<std::uint32_t>(len));
        std::memcpy(head + 4, type, 4);
        f.write(reinterpret_cast<const char*>(head), 8);
        if (len) f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
        uLong crc = crc32(0L, Z_NULL, 0);
        crc = crc32(crc, head + 4, 4);
        if (len) crc = crc32(crc, data, static_cast<uInt>(len));
        std::uint8_t tail[4];
        put_u32(tail, static_cast<std::uint32_t>(crc));
        f.write(reinterpret_cast<const char*>(tail), 4);
    }

    std::size_t w_, h_;
    std::vector<std::uint8_t> px_;
};

}  // namespace jsac
