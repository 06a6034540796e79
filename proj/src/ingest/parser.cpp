#include "mmrag/ingest/parser.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "../http_util.hpp"
#include "mmrag/errors.hpp"
#include "mmrag/ingest/image.hpp"
#include "mmrag/util.hpp"

namespace mmrag::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

corpus::SourceDocument DocumentParser::parse(std::string_view doc_id, std::string_view pdf) const {
  return document_from_docling(parse_raw(doc_id, pdf), doc_id);
}

namespace {

corpus::PageImage image_from_data_uri(const json& image_ref, std::string_view what) {
  if (!image_ref.is_object() || !image_ref.contains("uri") || !image_ref["uri"].is_string()) {
    throw ProtocolError(fmt::format("{} has no embedded image", what));
  }
  const auto& uri = image_ref["uri"].get_ref<const std::string&>();
  const auto comma = uri.find(',');
  if (uri.rfind("data:", 0) != 0 || comma == std::string::npos || uri.find(";base64") > comma) {
    throw ProtocolError(fmt::format("{} image is not a base64 data URI", what));
  }
  return page_image_from_bytes(base64_decode(std::string_view(uri).substr(comma + 1)));
}

int page_of(const json& item) {
  if (item.contains("prov") && item["prov"].is_array() && !item["prov"].empty()) {
    return item["prov"][0].value("page_no", 1);
  }
  return 1;
}

std::string table_text(const json& table) {
  if (!table.contains("data") || !table["data"].is_object()) return {};
  const auto& data = table["data"];
  std::string out;
  if (data.contains("grid") && data["grid"].is_array()) {
    for (const auto& row : data["grid"]) {
      std::string line;
      for (const auto& cell : row) {
        if (!line.empty()) line += " | ";
        line += cell.value("text", "");
      }
      if (!out.empty()) out += '\n';
      out += line;
    }
  } else if (data.contains("table_cells") && data["table_cells"].is_array()) {
    for (const auto& cell : data["table_cells"]) {
      if (!out.empty()) out += ' ';
      out += cell.value("text", "");
    }
  }
  return out;
}

class DoclingWalker {
 public:
  DoclingWalker(const json& doc, std::string_view doc_id) : doc_(doc), doc_id_(doc_id) {}

  corpus::SourceDocument run() {
    corpus::SourceDocument out;
    out.id = doc_id_;
    read_pages(out);
    if (doc_.contains("body") && doc_["body"].contains("children")) {
      for (const auto& child : doc_["body"]["children"]) visit(child, out);
    } else {
      // No body tree: fall back to storage order.
      for (const char* coll : {"texts", "tables", "pictures"}) {
        if (!doc_.contains(coll)) continue;
        for (std::size_t i = 0; i < doc_[coll].size(); ++i) {
          visit(json{{"$ref", fmt::format("#/{}/{}", coll, i)}}, out);
        }
      }
    }
    out.title = title_.empty() ? doc_.value("name", std::string(doc_id_)) : title_;
    if (out.title.empty()) out.title = doc_id_;
    return out;
  }

 private:
  void read_pages(corpus::SourceDocument& out) {
    if (!doc_.contains("pages") || !doc_["pages"].is_object()) {
      throw ProtocolError("parsed document has no pages");
    }
    for (const auto& [key, page] : doc_["pages"].items()) {
      const int no = page.value("page_no", std::atoi(key.c_str()));
      out.pages.push_back({no, image_from_data_uri(page.value("image", json()), fmt::format("page {}", no))});
    }
    std::sort(out.pages.begin(), out.pages.end(), [](const auto& a, const auto& b) { return a.number < b.number; });
  }

  const json* resolve(const json& ref, std::string* coll, std::size_t* idx) const {
    if (!ref.is_object() || !ref.contains("$ref")) return nullptr;
    const auto r = ref["$ref"].get<std::string>();  // "#/texts/3"
    const auto a = r.find('/', 2);
    if (r.rfind("#/", 0) != 0 || a == std::string::npos) return nullptr;
    *coll = r.substr(2, a - 2);
    *idx = static_cast<std::size_t>(std::stoul(r.substr(a + 1)));
    if (!doc_.contains(*coll) || *idx >= doc_[*coll].size()) {
      throw ProtocolError(fmt::format("dangling reference '{}'", r));
    }
    return &doc_[*coll][*idx];
  }

  void emit_captions(const json& item, corpus::SourceDocument& out, std::optional<std::string>* caption) {
    if (!item.contains("captions")) return;
    for (const auto& cref : item["captions"]) {
      std::string coll;
      std::size_t idx = 0;
      const json* c = resolve(cref, &coll, &idx);
      if (c == nullptr || !visited_.insert(coll + "/" + std::to_string(idx)).second) continue;
      const auto text = c->value("text", "");
      if (trim(text).empty()) continue;
      out.elements.push_back({corpus::ElementKind::Caption, text, page_of(*c)});
      *caption = caption->has_value() ? **caption + " " + text : text;
    }
  }

  corpus::PageImage asset_image(const json& item, int page, const corpus::SourceDocument& out,
                                std::string_view what) {
    if (item.contains("image") && item["image"].is_object() && item["image"].contains("uri")) {
      return image_from_data_uri(item["image"], what);
    }
    for (const auto& p : out.pages) {
      if (p.number == page) return p.image;
    }
    throw ProtocolError(fmt::format("{} references missing page {}", what, page));
  }

  void visit(const json& ref, corpus::SourceDocument& out) {
    std::string coll;
    std::size_t idx = 0;
    const json* item = resolve(ref, &coll, &idx);
    if (item == nullptr || !visited_.insert(coll + "/" + std::to_string(idx)).second) return;

    if (coll == "texts") {
      const auto label = item->value("label", "text");
      if (label == "page_header" || label == "page_footer") return;
      const auto text = item->value("text", "");
      if (label == "title" && title_.empty()) title_ = text;
      corpus::ElementKind kind = corpus::ElementKind::Paragraph;
      if (label == "title" || label == "section_header") kind = corpus::ElementKind::Heading;
      if (label == "caption") kind = corpus::ElementKind::Caption;
      if (!trim(text).empty()) out.elements.push_back({kind, text, page_of(*item)});
    } else if (coll == "tables") {
      const int page = page_of(*item);
      const auto text = table_text(*item);
      if (!trim(text).empty()) out.elements.push_back({corpus::ElementKind::Table, text, page});
      corpus::VisualAsset asset;
      asset.id = fmt::format("{}/table-{}", doc_id_, ++n_tables_);
      asset.kind = corpus::AssetKind::Table;
      asset.page = page;
      asset.image = asset_image(*item, page, out, asset.id);
      emit_captions(*item, out, &asset.caption);
      out.assets.push_back(std::move(asset));
      return;
    } else if (coll == "pictures") {
      const int page = page_of(*item);
      corpus::VisualAsset asset;
      asset.id = fmt::format("{}/figure-{}", doc_id_, ++n_figures_);
      asset.kind = corpus::AssetKind::Figure;
      asset.page = page;
      asset.image = asset_image(*item, page, out, asset.id);
      emit_captions(*item, out, &asset.caption);
      if (item->contains("annotations")) {
        for (const auto& a : (*item)["annotations"]) {
          if (a.value("kind", "") == "description" && !trim(a.value("text", "")).empty()) {
            out.elements.push_back({corpus::ElementKind::Figure, a.value("text", ""), page});
          }
        }
      }
      out.assets.push_back(std::move(asset));
      return;
    } else if (coll != "groups") {
      return;
    }
    if (item->contains("children")) {
      for (const auto& child : (*item)["children"]) visit(child, out);
    }
  }

  const json& doc_;
  std::string doc_id_;
  std::string title_;
  std::set<std::string> visited_;
  int n_tables_ = 0;
  int n_figures_ = 0;
};

}  // namespace

corpus::SourceDocument document_from_docling(const json& response, std::string_view doc_id) {
  const json* doc = &response;
  if (response.contains("document")) {
    const auto status = response.value("status", std::string("success"));
    if (status != "success" && status != "partial_success") {
      throw ProtocolError(fmt::format("conversion of '{}' failed with status '{}': {}", doc_id, status,
                                      response.value("errors", json::array()).dump()));
    }
    const auto& d = response["document"];
    if (!d.contains("json_content") || d["json_content"].is_null()) {
      throw ProtocolError(fmt::format("conversion of '{}' carries no json_content", doc_id));
    }
    doc = &d["json_content"];
  }
  corpus::SourceDocument out;
  try {
    out = DoclingWalker(*doc, doc_id).run();
  } catch (const json::exception& e) {
    throw ProtocolError(fmt::format("malformed parse of '{}': {}", doc_id, e.what()));
  }
  if (out.elements.empty() && out.assets.empty()) {
    throw Error(fmt::format("no elements detected in '{}'", doc_id));
  }
  if (const auto v = corpus::validate_document(out); !v.empty()) {
    throw ProtocolError(fmt::format("parse of '{}' is inconsistent: {}", doc_id, v.front()));
  }
  return out;
}

DoclingServeParser::DoclingServeParser(ParserEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  endpoint_.validate();
}

json DoclingServeParser::parse_raw(std::string_view doc_id, std::string_view pdf) const {
  if (pdf.empty()) throw PreconditionError(fmt::format("PDF for '{}' is empty", doc_id));
  const auto url = detail::split_url(endpoint_.base_url);
  auto client = detail::make_client(url, endpoint_.timeout_s);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
    headers.emplace("X-Api-Key", endpoint_.api_key);
  }
  const httplib::MultipartFormDataItems items = {
      {"files", std::string(pdf), std::string(doc_id) + ".pdf", "application/pdf"},
      {"to_formats", "json", "", ""},
      {"image_export_mode", "embedded", "", ""},
      {"include_images", "true", "", ""},
  };
  const auto path = url.prefix + "/v1/convert/file";
  auto res = client->Post(path, headers, items);
  detail::check_result(res, fmt::format("parse '{}'", doc_id), endpoint_.base_url + path);
  try {
    return json::parse(res->body);
  } catch (const json::parse_error&) {
    throw ProtocolError(fmt::format("parser response for '{}' is not JSON", doc_id));
  }
}

json FixtureParser::parse_raw(std::string_view doc_id, std::string_view) const {
  const auto path = (fs::path(dir_) / (std::string(doc_id) + ".json")).string();
  if (!fs::exists(path)) throw Error(fmt::format("no recorded parse for '{}' at {}", doc_id, path));
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ProtocolError(fmt::format("recorded parse '{}' is not JSON: {}", path, e.what()));
  }
}

json RecordingParser::parse_raw(std::string_view doc_id, std::string_view pdf) const {
  auto response = inner_->parse_raw(doc_id, pdf);
  fs::create_directories(dir_);
  write_file((fs::path(dir_) / (std::string(doc_id) + ".json")).string(), response.dump());
  return response;
}

}  // namespace mmrag::ingest
