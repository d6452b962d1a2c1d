#pragma once

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "panokit/error.hpp"
#include "panokit/tensor.hpp"

namespace panokit::io {

/// frame_%06d.png
inline std::string frame_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06zu.png", index);
    return buf;
}

[[nodiscard]] inline unsigned char quantize_unit(double v) noexcept {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

/// Writes each frame of a (C, F, H, W) tensor as an 8-bit PNG; C must be 1
/// (gray), 3 (RGB) or 4 (RGBA). Values are clamped to [0, 1].
inline void write_png_frames(const std::filesystem::path& dir, const Tensor& t) {
    png_uint_32 format = 0;
    switch (t.channels()) {
        case 1: format = PNG_FORMAT_GRAY; break;
        case 3: format = PNG_FORMAT_RGB; break;
        case 4: format = PNG_FORMAT_RGBA; break;
        default:
            throw InvalidArgument("PNG frames need 1, 3 or 4 channels, got " + std::to_string(t.channels()));
    }
    std::filesystem::create_directories(dir);
    std::vector<unsigned char> pixels(t.channels() * t.height() * t.width());
    for (std::size_t f = 0; f < t.frames(); ++f) {
        for (std::size_t y = 0; y < t.height(); ++y)
            for (std::size_t x = 0; x < t.width(); ++x)
                for (std::size_t c = 0; c < t.channels(); ++c)
                    pixels[(y * t.width() + x) * t.channels() + c] = quantize_unit(t(c, f, y, x));
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        image.width = static_cast<png_uint_32>(t.width());
        image.height = static_cast<png_uint_32>(t.height());
        image.format = format;
        const auto path = (dir / frame_file_name(f)).string();
        if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr))
            throw Error("failed writing '" + path + "': " + image.message);
    }
}

/// Reads frame_000000.png, frame_000001.png, ... from a directory. The
/// sequence must be gap-free and every frame must share size and format.
inline Tensor read_png_frames(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("'" + dir.string() + "' is not a directory");
    static const std::regex pattern(R"(frame_(\d{6})\.png)");
    std::map<std::size_t, std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) files[std::stoul(m[1].str())] = entry.path();
    }
    if (files.empty()) throw CorruptFile("no frame_%06d.png files in '" + dir.string() + "'");
    std::size_t expected = 0;
    for (const auto& [idx, path] : files) {
        if (idx != expected)
            throw CorruptFile("missing frame " + frame_file_name(expected) + " in '" + dir.string() + "'");
        ++expected;
    }

    Tensor out;
    std::size_t channels = 0;
    for (const auto& [idx, path] : files) {
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        if (!png_image_begin_read_from_file(&image, path.string().c_str()))
            throw CorruptFile("cannot read '" + path.string() + "': " + image.message);
        const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
        const bool alpha = image.format & PNG_FORMAT_FLAG_ALPHA;
        image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB) : PNG_FORMAT_GRAY;
        const std::size_t c = color ? (alpha ? 4 : 3) : 1;
        std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image));
        if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr))
            throw CorruptFile("cannot decode '" + path.string() + "': " + image.message);
        if (idx == 0) {
            channels = c;
            out = Tensor({c, files.size(), image.height, image.width});
        } else if (c != channels || image.height != out.height() || image.width != out.width()) {
            throw CorruptFile("frame '" + path.string() + "' differs in size or format from frame 0");
        }
        for (std::size_t y = 0; y < out.height(); ++y)
            for (std::size_t x = 0; x < out.width(); ++x)
                for (std::size_t ch = 0; ch < c; ++ch)
                    out(ch, idx, y, x) = pixels[(y * out.width() + x) * c + ch] / 255.0;
    }
    return out;
}

}  // namespace panokit::io
