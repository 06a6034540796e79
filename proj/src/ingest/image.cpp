#include "mmrag/ingest/image.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "mmrag/errors.hpp"

namespace mmrag::ingest {

void IngestionConfig::validate() const {
  if (token_budget < 1) throw ConfigError("token_budget must be >= 1");
  if (image_long_side_px < 1) throw ConfigError("image_long_side_px must be >= 1");
}

void ParserEndpoint::validate() const {
  if (base_url.empty()) throw ConfigError("parser endpoint base_url is empty");
  if (!(timeout_s > 0.0)) throw ConfigError("parser endpoint timeout_s must be > 0");
}

namespace {

cv::Mat decode(const std::string& bytes) {
  if (bytes.empty()) throw FormatError("empty image payload");
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
  cv::Mat img = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
  if (img.empty()) throw FormatError("image payload is not a decodable PNG or JPEG");
  return img;
}

corpus::ImageEncoding sniff(const std::string& bytes) {
  if (bytes.size() >= 8 && static_cast<unsigned char>(bytes[0]) == 0x89 && bytes.compare(1, 3, "PNG") == 0) {
    return corpus::ImageEncoding::Png;
  }
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
      static_cast<unsigned char>(bytes[1]) == 0xD8) {
    return corpus::ImageEncoding::Jpeg;
  }
  throw FormatError("image payload is neither PNG nor JPEG");
}

std::string encode(const cv::Mat& img, corpus::ImageEncoding enc) {
  std::vector<uchar> buf;
  const bool ok = enc == corpus::ImageEncoding::Png
                      ? cv::imencode(".png", img, buf, {cv::IMWRITE_PNG_COMPRESSION, 6})
                      : cv::imencode(".jpg", img, buf, {cv::IMWRITE_JPEG_QUALITY, 95});
  if (!ok) throw FormatError("image re-encoding failed");
  return {buf.begin(), buf.end()};
}

}  // namespace

corpus::PageImage page_image_from_bytes(std::string bytes) {
  const auto enc = sniff(bytes);
  const cv::Mat img = decode(bytes);
  return {img.cols, img.rows, std::move(bytes), enc};
}

std::pair<int, int> capped_size(int width, int height, int cap) {
  if (width < 1 || height < 1 || cap < 1) throw PreconditionError("image sizes and cap must be positive");
  if (std::max(width, height) <= cap) return {width, height};
  const auto scale_short = [cap](int short_side, int long_side) {
    const long v = std::lround(static_cast<double>(short_side) * cap / long_side);
    return static_cast<int>(std::max(1L, v));
  };
  if (width >= height) return {cap, scale_short(height, width)};
  return {scale_short(width, height), cap};
}

corpus::PageImage normalize_page_image(const corpus::PageImage& img, const IngestionConfig& cfg) {
  const cv::Mat decoded = decode(img.bytes);
  if (std::max(decoded.cols, decoded.rows) <= cfg.image_long_side_px) {
    if (decoded.cols == img.width_px && decoded.rows == img.height_px) return img;
    auto fixed = img;
    fixed.width_px = decoded.cols;
    fixed.height_px = decoded.rows;
    return fixed;
  }
  const auto [w, h] = capped_size(decoded.cols, decoded.rows, cfg.image_long_side_px);
  cv::Mat resized;
  cv::resize(decoded, resized, cv::Size(w, h), 0, 0, cv::INTER_AREA);
  return {w, h, encode(resized, img.encoding), img.encoding};
}

corpus::PageImage solid_image(int width, int height, corpus::ImageEncoding enc, unsigned char gray) {
  const cv::Mat img(height, width, CV_8UC3, cv::Scalar(gray, gray, gray));
  return {width, height, encode(img, enc), enc};
}

}  // namespace mmrag::ingest
