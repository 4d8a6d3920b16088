#pragma once

#include "hdrtv/color.hpp"

namespace hdrtv {

// Original frame dimensions, recorded so a padded result can be cropped back.
struct CropRecord {
    int height = 0;
    int width = 0;
};

// Replicate-pads the right and bottom edges up to the next multiple of
// `multiple`. Already-aligned frames pass through unchanged. The content
// region is preserved bit for bit.
std::pair<ImageFrame, CropRecord> pad_to_multiple(const ImageFrame& frame,
                                                  int multiple = 32);

ImageFrame unpad(const ImageFrame& frame, const CropRecord& record);

} // namespace hdrtv
