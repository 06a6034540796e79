#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mmrag/corpus/types.hpp"
#include "mmrag/ingest/config.hpp"

namespace mmrag::ingest {

/// Turns a PDF into a SourceDocument.
class DocumentParser {
 public:
  virtual ~DocumentParser() = default;
  /// Raw structured parse as returned by the parsing service.
  virtual nlohmann::json parse_raw(std::string_view doc_id, std::string_view pdf) const = 0;
  corpus::SourceDocument parse(std::string_view doc_id, std::string_view pdf) const;
};

/// Builds a SourceDocument from a docling-serve conversion response (or a bare
/// DoclingDocument). Elements follow the body tree order; tables become Table elements
/// (grid text) plus Table assets, pictures become Figure assets, captions become Caption
/// elements. Page images are required for every page.
/// Throws ProtocolError on a failed conversion or malformed payload, and Error
/// "no elements detected" when nothing was found.
corpus::SourceDocument document_from_docling(const nlohmann::json& response, std::string_view doc_id);

/// Uploads the PDF to a docling-serve instance: POST {base}/v1/convert/file.
class DoclingServeParser final : public DocumentParser {
 public:
  explicit DoclingServeParser(ParserEndpoint endpoint);
  nlohmann::json parse_raw(std::string_view doc_id, std::string_view pdf) const override;

 private:
  ParserEndpoint endpoint_;
};

/// Replays recorded responses: `<dir>/<doc_id>.json`. The PDF bytes are ignored.
class FixtureParser final : public DocumentParser {
 public:
  explicit FixtureParser(std::string dir) : dir_(std::move(dir)) {}
  nlohmann::json parse_raw(std::string_view doc_id, std::string_view pdf) const override;

 private:
  std::string dir_;
};

/// Forwards to another parser and stores each response verbatim as a fixture.
class RecordingParser final : public DocumentParser {
 public:
  RecordingParser(const DocumentParser& inner, std::string dir) : inner_(&inner), dir_(std::move(dir)) {}
  nlohmann::json parse_raw(std::string_view doc_id, std::string_view pdf) const override;

 private:
  const DocumentParser* inner_;
  std::string dir_;
};

}  // namespace mmrag::ingest
