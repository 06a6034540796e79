#pragma once

#include <string>
#include <utility>

#include "mmrag/corpus/types.hpp"
#include "mmrag/ingest/config.hpp"

namespace mmrag::ingest {

/// Decodes `bytes` (PNG or JPEG, detected from the magic number) and returns a PageImage
/// with true dimensions. Throws FormatError when undecodable.
corpus::PageImage page_image_from_bytes(std::string bytes);

/// Target size after capping the long side at `cap`: the long side becomes exactly `cap`,
/// the short side is scaled by the same factor and rounded to nearest (minimum 1).
std::pair<int, int> capped_size(int width, int height, int cap);

/// Returns `img` unchanged when its long side is within the cap, otherwise an
/// area-averaged downscale re-encoded in the same format.
corpus::PageImage normalize_page_image(const corpus::PageImage& img, const IngestionConfig& cfg);

/// Solid-colour test/fixture image.
corpus::PageImage solid_image(int width, int height, corpus::ImageEncoding enc = corpus::ImageEncoding::Png,
                              unsigned char gray = 200);

}  // namespace mmrag::ingest
