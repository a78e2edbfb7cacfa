#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artikit/errors.hpp"

namespace artikit {

// Minimal XML DOM covering the URDF subset: elements, attributes, character
// data, comments and an optional declaration. No namespaces, DOCTYPE or CDATA.
struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlNode> children;
    std::string text;
    int line = 0;

    const std::string* attribute(std::string_view key) const {
        for (const auto& [k, v] : attributes)
            if (k == key) return &v;
        return nullptr;
    }

    const XmlNode* child(std::string_view tag) const {
        for (const auto& c : children)
            if (c.name == tag) return &c;
        return nullptr;
    }

    std::vector<const XmlNode*> children_named(std::string_view tag) const {
        std::vector<const XmlNode*> out;
        for (const auto& c : children)
            if (c.name == tag) out.push_back(&c);
        return out;
    }
};

namespace detail {

class XmlParser {
public:
    explicit XmlParser(std::string_view text) : text_(text) {}

    XmlNode parse() {
        skip_misc();
        if (eof()) fail("document contains no root element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof()) fail("content after root element");
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw XmlSyntaxError("line " + std::to_string(line_) + ": " + what);
    }

    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) advance();
    }

    void skip_comment() {
        pos_ += 4;  // "<!--"
        while (!eof()) {
            if (starts_with("-->")) {
                pos_ += 3;
                return;
            }
            advance();
        }
        fail("unterminated comment");
    }

    void skip_declaration() {
        pos_ += 2;  // "<?"
        while (!eof()) {
            if (starts_with("?>")) {
                pos_ += 2;
                return;
            }
            advance();
        }
        fail("unterminated declaration");
    }

    // whitespace, comments, and the <?xml?> prolog outside the root
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<?")) {
                skip_declaration();
            } else {
                return;
            }
        }
    }

    static bool is_name_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':';
    }
    static bool is_name_char(char c) {
        return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected a name");
        std::string name;
        while (!eof() && is_name_char(peek())) name += advance();
        return name;
    }

    std::string decode_entity() {
        // at '&'
        advance();
        std::string ref;
        while (!eof() && peek() != ';') {
            ref += advance();
            if (ref.size() > 10) fail("malformed entity reference");
        }
        if (eof()) fail("unterminated entity reference");
        advance();  // ';'
        if (ref == "amp") return "&";
        if (ref == "lt") return "<";
        if (ref == "gt") return ">";
        if (ref == "quot") return "\"";
        if (ref == "apos") return "'";
        if (!ref.empty() && ref[0] == '#') {
            int base = 10;
            std::string digits = ref.substr(1);
            if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                base = 16;
                digits = digits.substr(1);
            }
            if (digits.empty()) fail("malformed character reference");
            long code = 0;
            for (char c : digits) {
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (base == 16 && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else { fail("malformed character reference"); }
                code = code * base + d;
            }
            if (code <= 0 || code > 0x10FFFF) fail("character reference out of range");
            // encode as UTF-8
            std::string out;
            if (code < 0x80) {
                out += static_cast<char>(code);
            } else if (code < 0x800) {
                out += static_cast<char>(0xC0 | (code >> 6));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else if (code < 0x10000) {
                out += static_cast<char>(0xE0 | (code >> 12));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (code >> 18));
                out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
            return out;
        }
        fail("unknown entity '&" + ref + ";'");
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        const char quote = advance();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' in attribute value");
            if (peek() == '&') value += decode_entity();
            else value += advance();
        }
        if (eof()) fail("unterminated attribute value");
        advance();  // closing quote
        return value;
    }

    XmlNode parse_element() {
        expect('<');
        XmlNode node;
        node.line = line_;
        node.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag for <" + node.name + ">");
            if (peek() == '/') {
                advance();
                expect('>');
                return node;  // self-closing
            }
            if (peek() == '>') {
                advance();
                break;
            }
            std::string key = parse_name();
            for (const auto& [k, v] : node.attributes)
                if (k == key) fail("duplicate attribute '" + key + "'");
            skip_ws();
            expect('=');
            skip_ws();
            node.attributes.emplace_back(std::move(key), parse_attr_value());
        }
        // content
        for (;;) {
            if (eof()) fail("unterminated element <" + node.name + ">");
            if (peek() == '<') {
                if (starts_with("<!--")) {
                    skip_comment();
                } else if (starts_with("</")) {
                    pos_ += 2;
                    std::string closing = parse_name();
                    if (closing != node.name)
                        fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
                    skip_ws();
                    expect('>');
                    return node;
                } else if (starts_with("<?")) {
                    fail("processing instruction inside element");
                } else {
                    node.children.push_back(parse_element());
                }
            } else if (peek() == '&') {
                node.text += decode_entity();
            } else {
                node.text += advance();
            }
        }
    }
};

}  // namespace detail

inline XmlNode parse_xml(std::string_view text) { return detail::XmlParser(text).parse(); }

inline std::string xml_escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace artikit
