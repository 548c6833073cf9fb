// Copyright 2026-present the unvd project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "unvd/embedding/image_codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "unvd/common/digest.hpp"
#include "unvd/common/error.hpp"

namespace unvd::embedding {

namespace {

constexpr std::string_view kPngMagic{"\x89PNG\r\n\x1a\n", 8};

bool starts_with(std::string_view bytes, std::string_view prefix) {
    return bytes.size() >= prefix.size() && bytes.substr(0, prefix.size()) == prefix;
}

void check_pixels(std::uint64_t width, std::uint64_t height, const DecodeLimits& limits) {
    if (width == 0 || height == 0) {
        raise(ErrorCode::DecodeError, "image has zero width or height");
    }
    if (width * height > limits.max_pixels) {
        raise(ErrorCode::TooLarge, "image has " + std::to_string(width * height) +
                                       " pixels, limit is " + std::to_string(limits.max_pixels));
    }
}

// --- PNG -----------------------------------------------------------------

// libpng reports errors by longjmp. Everything that must survive the jump
// lives on the heap behind a pointer that is fixed before setjmp.
struct PngReadState {
    std::string_view data;
    std::size_t pos = 0;
    std::string message;
    PixelGrid grid;
    std::vector<png_bytep> rows;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngReadState() { png_destroy_read_struct(&png, info != nullptr ? &info : nullptr, nullptr); }
};

void png_on_error(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
    state->message = msg;
    png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

void png_read_bytes(png_structp png, png_bytep out, png_size_t n) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->data.size() - state->pos < n) {
        png_error(png, "unexpected end of PNG data");
    }
    std::memcpy(out, state->data.data() + state->pos, n);
    state->pos += n;
}

PixelGrid decode_png(std::string_view bytes, const DecodeLimits& limits) {
    auto state = std::make_unique<PngReadState>();
    state->data = bytes;
    state->png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state.get(), png_on_error, png_on_warning);
    if (state->png == nullptr) {
        raise(ErrorCode::DecodeError, "png_create_read_struct failed");
    }
    state->info = png_create_info_struct(state->png);
    if (state->info == nullptr) {
        raise(ErrorCode::DecodeError, "png_create_info_struct failed");
    }
    png_structp png = state->png;
    png_infop info = state->info;
    if (setjmp(png_jmpbuf(png))) {
        raise(ErrorCode::DecodeError, "corrupt PNG: " + state->message);
    }
    png_set_read_fn(png, state.get(), png_read_bytes);
    png_read_info(png, info);

    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    check_pixels(width, height, limits);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
        raise(ErrorCode::DecodeError, "unexpected PNG row layout after transforms");
    }

    auto& grid = state->grid;
    grid.width = width;
    grid.height = height;
    grid.rgb.resize(static_cast<std::size_t>(width) * height * 3);
    state->rows.resize(height);
    for (std::uint32_t r = 0; r < height; ++r) {
        state->rows[r] = grid.rgb.data() + static_cast<std::size_t>(r) * width * 3;
    }
    png_read_image(png, state->rows.data());
    png_read_end(png, nullptr);
    return std::move(state->grid);
}

struct PngWriteState {
    std::string out;
    std::string message;
    png_structp png = nullptr;
    png_infop info = nullptr;

    ~PngWriteState() { png_destroy_write_struct(&png, info != nullptr ? &info : nullptr); }
};

void png_write_on_error(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngWriteState*>(png_get_error_ptr(png));
    state->message = msg;
    png_longjmp(png, 1);
}

void png_write_bytes(png_structp png, png_bytep data, png_size_t n) {
    auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
    state->out.append(reinterpret_cast<const char*>(data), n);
}

void png_flush(png_structp) {}

// --- JPEG ----------------------------------------------------------------

struct JpegState {
    jpeg_decompress_struct cinfo{};
    jpeg_error_mgr mgr{};
    std::jmp_buf jump{};
    std::string message;
    PixelGrid grid;
    bool created = false;

    ~JpegState() {
        if (created) {
            jpeg_destroy_decompress(&cinfo);
        }
    }
};

void jpeg_on_error(j_common_ptr cinfo) {
    auto* state = static_cast<JpegState*>(cinfo->client_data);
    char buffer[JMSG_LENGTH_MAX];
    (*cinfo->err->format_message)(cinfo, buffer);
    state->message = buffer;
    std::longjmp(state->jump, 1);
}

void jpeg_on_message(j_common_ptr) {}

PixelGrid decode_jpeg(std::string_view bytes, const DecodeLimits& limits) {
    auto state = std::make_unique<JpegState>();
    auto* cinfo = &state->cinfo;
    cinfo->err = jpeg_std_error(&state->mgr);
    state->mgr.error_exit = jpeg_on_error;
    state->mgr.output_message = jpeg_on_message;
    cinfo->client_data = state.get();
    if (setjmp(state->jump)) {
        raise(ErrorCode::DecodeError, "corrupt JPEG: " + state->message);
    }
    jpeg_create_decompress(cinfo);
    state->created = true;
    jpeg_mem_src(cinfo, reinterpret_cast<const unsigned char*>(bytes.data()),
                 static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(cinfo, TRUE);
    check_pixels(cinfo->image_width, cinfo->image_height, limits);
    cinfo->out_color_space = JCS_RGB;
    jpeg_start_decompress(cinfo);
    if (cinfo->output_components != 3) {
        raise(ErrorCode::UnsupportedFormat, "JPEG colour space cannot be converted to RGB");
    }
    auto& grid = state->grid;
    grid.width = cinfo->output_width;
    grid.height = cinfo->output_height;
    grid.rgb.resize(grid.pixel_count() * 3);
    while (cinfo->output_scanline < cinfo->output_height) {
        JSAMPROW row = grid.rgb.data() + static_cast<std::size_t>(cinfo->output_scanline) * grid.width * 3;
        jpeg_read_scanlines(cinfo, &row, 1);
    }
    jpeg_finish_decompress(cinfo);
    return std::move(state->grid);
}

}  // namespace

std::string sniff_mime(std::string_view bytes) {
    if (starts_with(bytes, kPngMagic)) {
        return "image/png";
    }
    if (starts_with(bytes, std::string_view("\xff\xd8\xff", 3))) {
        return "image/jpeg";
    }
    if (starts_with(bytes, "GIF87a") || starts_with(bytes, "GIF89a")) {
        return "image/gif";
    }
    if (bytes.size() >= 12 && starts_with(bytes, "RIFF") && bytes.substr(8, 4) == "WEBP") {
        return "image/webp";
    }
    if (starts_with(bytes, "BM")) {
        return "image/bmp";
    }
    return "application/octet-stream";
}

PixelGrid decode_media(std::string_view bytes, const DecodeLimits& limits) {
    if (bytes.size() > limits.max_bytes) {
        raise(ErrorCode::TooLarge, "media is " + std::to_string(bytes.size()) + " bytes, cap is " +
                                       std::to_string(limits.max_bytes));
    }
    if (bytes.empty()) {
        raise(ErrorCode::UnsupportedFormat, "media is empty");
    }
    const auto mime = sniff_mime(bytes);
    if (mime == "image/png") {
        return decode_png(bytes, limits);
    }
    if (mime == "image/jpeg") {
        return decode_jpeg(bytes, limits);
    }
    raise(ErrorCode::UnsupportedFormat, "unsupported media type " + mime);
}

std::string encode_png(const PixelGrid& grid) {
    if (grid.width == 0 || grid.height == 0 || grid.rgb.size() != grid.pixel_count() * 3) {
        raise(ErrorCode::InvalidArgument, "pixel grid is empty or inconsistent");
    }
    auto state = std::make_unique<PngWriteState>();
    state->png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state.get(), png_write_on_error,
                                         png_on_warning);
    if (state->png == nullptr) {
        raise(ErrorCode::IoError, "png_create_write_struct failed");
    }
    state->info = png_create_info_struct(state->png);
    if (state->info == nullptr) {
        raise(ErrorCode::IoError, "png_create_info_struct failed");
    }
    png_structp png = state->png;
    png_infop info = state->info;
    if (setjmp(png_jmpbuf(png))) {
        raise(ErrorCode::IoError, "PNG encode failed: " + state->message);
    }
    png_set_write_fn(png, state.get(), png_write_bytes, png_flush);
    png_set_IHDR(png, info, grid.width, grid.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::uint32_t r = 0; r < grid.height; ++r) {
        png_write_row(png, grid.rgb.data() + static_cast<std::size_t>(r) * grid.width * 3);
    }
    png_write_end(png, nullptr);
    return std::move(state->out);
}

std::string pixel_checksum(const PixelGrid& grid) { return sha256_hex(grid.rgb); }

}  // namespace unvd::embedding
