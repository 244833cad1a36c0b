#include "wshex/lexer.hpp"

#include <cctype>

namespace wshex {

std::string ParseDiagnostic::str() const {
  std::string out = std::to_string(position.line) + ":" + std::to_string(position.column) + ": " + message;
  if (!expected.empty()) {
    out += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out += ", ";
      out += expected[i];
    }
    out += ")";
  }
  return out;
}

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::PName: return "prefixed name";
    case Tok::Angle: return "'<...>'";
    case Tok::String: return "string literal";
    case Tok::Number: return "number";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracePipe: return "'{|'";
    case Tok::PipeRBrace: return "'|}'";
    case Tok::LBracketPipe: return "'[|'";
    case Tok::PipeRBracket: return "'|]'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Pipe: return "'|'";
    case Tok::At: return "'@'";
    case Tok::Dot: return "'.'";
    case Tok::Question: return "'?'";
    case Tok::Star: return "'*'";
    case Tok::Plus: return "'+'";
    case Tok::Carets: return "'^^'";
    case Tok::Percent: return "'%'";
    case Tok::Invalid: return "invalid character";
  }
  return "token";
}

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  LexResult run() {
    LexResult out;
    while (true) {
      skip_space();
      Token tok;
      tok.pos = pos_;
      if (at_end()) {
        tok.kind = Tok::End;
        out.tokens.push_back(tok);
        return out;
      }
      lex_one(tok, out.diagnostics);
      out.tokens.push_back(std::move(tok));
    }
  }

 private:
  bool at_end() const { return pos_.byte_offset >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    auto i = pos_.byte_offset + ahead;
    return i < text_.size() ? text_[i] : '\0';
  }
  void advance() {
    if (text_[pos_.byte_offset] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++pos_.byte_offset;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void single(Token& tok, Tok kind, std::size_t n = 1) {
    tok.kind = kind;
    tok.text = std::string(text_.substr(pos_.byte_offset, n));
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  void lex_local(Token& tok) {
    // Local part of a prefixed name; dots allowed inside, not at the end.
    while (!at_end()) {
      char c = peek();
      if (name_char(c)) {
        tok.text += c;
        advance();
      } else if (c == '.' && name_char(peek(1))) {
        tok.text += c;
        advance();
      } else {
        break;
      }
    }
  }

  void lex_one(Token& tok, std::vector<ParseDiagnostic>& diags) {
    char c = peek();
    switch (c) {
      case '{':
        return peek(1) == '|' ? single(tok, Tok::LBracePipe, 2) : single(tok, Tok::LBrace);
      case '}': return single(tok, Tok::RBrace);
      case '[':
        return peek(1) == '|' ? single(tok, Tok::LBracketPipe, 2) : single(tok, Tok::LBracket);
      case ']': return single(tok, Tok::RBracket);
      case '|':
        if (peek(1) == '}') return single(tok, Tok::PipeRBrace, 2);
        if (peek(1) == ']') return single(tok, Tok::PipeRBracket, 2);
        return single(tok, Tok::Pipe);
      case '(': return single(tok, Tok::LParen);
      case ')': return single(tok, Tok::RParen);
      case ';': return single(tok, Tok::Semi);
      case ',': return single(tok, Tok::Comma);
      case '@': return single(tok, Tok::At);
      case '.': return single(tok, Tok::Dot);
      case '?': return single(tok, Tok::Question);
      case '*': return single(tok, Tok::Star);
      case '%': return single(tok, Tok::Percent);
      case '^':
        if (peek(1) == '^') return single(tok, Tok::Carets, 2);
        break;
      case '<': return lex_angle(tok, diags);
      case '"': return lex_string(tok, diags);
      default: break;
    }
    if (c == '+' || c == '-') {
      if (std::isdigit(static_cast<unsigned char>(peek(1)))) return lex_number(tok);
      if (c == '+') return single(tok, Tok::Plus);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(tok);
    if (c == ':') {
      tok.kind = Tok::PName;
      tok.text = ":";
      advance();
      lex_local(tok);
      return;
    }
    if (name_start(c)) {
      tok.kind = Tok::Ident;
      while (!at_end() && name_char(peek())) {
        tok.text += peek();
        advance();
      }
      if (peek() == ':') {
        tok.kind = Tok::PName;
        tok.text += ':';
        advance();
        lex_local(tok);
      }
      return;
    }
    tok.kind = Tok::Invalid;
    tok.text = std::string(1, c);
    diags.push_back({tok.pos, std::string("unexpected character '") + c + "'", {}});
    advance();
  }

  void lex_number(Token& tok) {
    tok.kind = Tok::Number;
    if (peek() == '+' || peek() == '-') {
      tok.text += peek();
      advance();
    }
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      tok.text += peek();
      advance();
    }
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      tok.text += '.';
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        tok.text += peek();
        advance();
      }
    }
  }

  void lex_angle(Token& tok, std::vector<ParseDiagnostic>& diags) {
    tok.kind = Tok::Angle;
    advance();
    while (!at_end() && peek() != '>') {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) break;
      tok.text += c;
      advance();
    }
    if (peek() != '>') {
      diags.push_back({tok.pos, "unterminated '<'", {"'>'"}});
      tok.kind = Tok::Invalid;
      return;
    }
    advance();
  }

  void lex_string(Token& tok, std::vector<ParseDiagnostic>& diags) {
    tok.kind = Tok::String;
    advance();
    while (!at_end() && peek() != '"') {
      char c = peek();
      if (c == '\n') break;
      if (c == '\\') {
        advance();
        if (at_end()) break;
        char e = peek();
        switch (e) {
          case 'n': tok.text += '\n'; break;
          case 't': tok.text += '\t'; break;
          case 'r': tok.text += '\r'; break;
          default: tok.text += e; break;
        }
        advance();
        continue;
      }
      tok.text += c;
      advance();
    }
    if (peek() != '"') {
      diags.push_back({tok.pos, "unterminated string literal", {"'\"'"}});
      tok.kind = Tok::Invalid;
      return;
    }
    advance();
  }

  std::string_view text_;
  SourcePosition pos_;
};

}  // namespace

LexResult tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace wshex
