#include "hdrtv/pad.hpp"

#include <algorithm>

namespace hdrtv {

std::pair<ImageFrame, CropRecord> pad_to_multiple(const ImageFrame& frame, int multiple) {
    if (multiple < 1)
        throw ConfigError("pad_to_multiple: multiple must be >= 1");
    const int h = frame.height();
    const int w = frame.width();
    const CropRecord record{h, w};
    const int ph = (h + multiple - 1) / multiple * multiple;
    const int pw = (w + multiple - 1) / multiple * multiple;
    if (ph == h && pw == w)
        return {frame, record};

    const Tensor& src = frame.pixels();
    Tensor dst(3, ph, pw);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < ph; ++y)
            for (int x = 0; x < pw; ++x)
                dst(c, y, x) = src(c, std::min(y, h - 1), std::min(x, w - 1));
    return {ImageFrame(std::move(dst), frame.gamut(), frame.transfer()), record};
}

ImageFrame unpad(const ImageFrame& frame, const CropRecord& record) {
    if (record.height > frame.height() || record.width > frame.width() ||
        record.height < 1 || record.width < 1)
        throw ShapeError("unpad: crop record exceeds frame bounds");
    if (record.height == frame.height() && record.width == frame.width())
        return frame;

    const Tensor& src = frame.pixels();
    Tensor dst(3, record.height, record.width);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < record.height; ++y)
            for (int x = 0; x < record.width; ++x)
                dst(c, y, x) = src(c, y, x);
    return ImageFrame(std::move(dst), frame.gamut(), frame.transfer());
}

} // namespace hdrtv
