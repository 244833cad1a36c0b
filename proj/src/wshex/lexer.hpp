#pragma once

// Tokenizer shared by the WShEx compact syntax and the ShExC subset read by
// the converter.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wshex {

struct SourcePosition {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
  std::size_t byte_offset = 0;
  bool operator==(const SourcePosition&) const = default;
};

struct ParseDiagnostic {
  SourcePosition position;
  std::string message;
  std::vector<std::string> expected;

  // "line:col: message (expected a, b)"
  std::string str() const;
};

enum class Tok {
  End,
  Ident,     // bare word: PREFIX, CLOSED, AND, Time, ...
  PName,     // prefix:local, either side may be empty
  Angle,     // <...>, text holds the content without brackets
  String,    // "...", text holds the unescaped content
  Number,    // [+-]?digits(.digits)?
  LBrace,    // {
  RBrace,    // }
  LBracePipe,     // {|
  PipeRBrace,     // |}
  LBracketPipe,   // [|
  PipeRBracket,   // |]
  LBracket,  // [
  RBracket,  // ]
  LParen,
  RParen,
  Semi,
  Comma,
  Pipe,
  At,
  Dot,
  Question,
  Star,
  Plus,
  Carets,    // ^^
  Percent,   // semantic action delimiter
  Invalid,
};

std::string_view describe(Tok kind);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePosition pos;
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by Tok::End
  std::vector<ParseDiagnostic> diagnostics;
};

// `#` starts a comment running to end of line.
LexResult tokenize(std::string_view text);

}  // namespace wshex
