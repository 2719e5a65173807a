// Minimal testlib-compatible header for validators and checkers.
// Supports the subset used by typical validators/checkers:
//   registerValidation, registerTestlibCmd, inf/ouf/ans streams,
//   readInt/readLong/readInts/readToken/readWord/readLine/readSpace/readEoln/readEof,
//   ensuref, quitf with _ok/_wa/_pe/_fail, format.
// Exit codes: 0 ok, 1 wrong answer, 2 presentation error, 3 fail.
#ifndef HACKFORGE_TESTLIB_H
#define HACKFORGE_TESTLIB_H

#include <cerrno>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

enum TResult { _ok = 0, _wa = 1, _pe = 2, _fail = 3 };

static bool __testlib_validator_mode = false;

inline std::string format(const char* fmt, ...) {
    char buf[1 << 14];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return std::string(buf);
}

inline std::string format(const std::string& s) { return s; }

[[noreturn]] inline void __testlib_quit(TResult r, const std::string& msg) {
    const char* tag = r == _ok ? "ok" : r == _wa ? "wrong answer" : r == _pe ? "wrong output format" : "FAIL";
    std::fprintf(stderr, "%s %s\n", tag, msg.c_str());
    std::fflush(stderr);
    std::exit(__testlib_validator_mode && r != _ok ? 3 : (int)r);
}

[[noreturn]] inline void quitf(TResult r, const char* fmt, ...) {
    char buf[1 << 14];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    __testlib_quit(r, buf);
}

[[noreturn]] inline void quit(TResult r, const std::string& msg) { __testlib_quit(r, msg); }

class InStream {
public:
    std::string data;
    size_t pos = 0;
    // Result used when reading fails: _fail for inf/ans, _pe for ouf, _fail in validators.
    TResult failResult = _fail;
    bool strict = false;
    std::string name;

    void init(const std::string& content, TResult onFail, bool strictMode, const std::string& n) {
        data = content;
        pos = 0;
        failResult = onFail;
        strict = strictMode;
        name = n;
    }

    [[noreturn]] void quitf(TResult r, const char* fmt, ...) {
        char buf[1 << 14];
        va_list ap;
        va_start(ap, fmt);
        vsnprintf(buf, sizeof(buf), fmt, ap);
        va_end(ap);
        __testlib_quit(r, buf);
    }

    [[noreturn]] void fail(const std::string& what) { __testlib_quit(failResult, name + ": " + what); }

    bool eof() const { return pos >= data.size(); }
    int peek() const { return eof() ? EOF : (unsigned char)data[pos]; }

    static bool isBlank(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

    void skipBlanks() {
        while (!eof() && isBlank(peek())) pos++;
    }

    bool seekEof() {
        skipBlanks();
        return eof();
    }

    std::string readWord() {
        if (!strict) skipBlanks();
        if (eof()) fail("unexpected end of file, token expected");
        if (isBlank(peek())) fail("token expected, whitespace found");
        size_t start = pos;
        while (!eof() && !isBlank(peek())) pos++;
        return data.substr(start, pos - start);
    }

    std::string readToken() { return readWord(); }
    std::string readToken(const std::string& /*pattern*/, const std::string& /*name*/ = "") { return readWord(); }
    std::string readWord(const std::string& /*pattern*/, const std::string& /*name*/ = "") { return readWord(); }

    long long readLong() {
        std::string tok = readWord();
        size_t i = 0;
        if (i < tok.size() && tok[i] == '-') i++;
        if (i == tok.size()) fail("expected integer, found \"" + tok + "\"");
        for (size_t j = i; j < tok.size(); j++)
            if (tok[j] < '0' || tok[j] > '9') fail("expected integer, found \"" + tok + "\"");
        if (tok.size() - i > 1 && tok[i] == '0') fail("integer with leading zeros: \"" + tok + "\"");
        if (tok == "-0") fail("negative zero");
        if (tok.size() - i > 19) fail("integer out of 64-bit range: \"" + tok + "\"");
        errno = 0;
        long long v = std::strtoll(tok.c_str(), nullptr, 10);
        if (errno == ERANGE) fail("integer out of 64-bit range: \"" + tok + "\"");
        return v;
    }

    long long readLong(long long lo, long long hi, const std::string& var = "") {
        long long v = readLong();
        if (v < lo || v > hi)
            fail(format("%s=%lld violates the range [%lld, %lld]", var.empty() ? "value" : var.c_str(), v, lo, hi));
        return v;
    }

    int readInt() {
        long long v = readLong();
        if (v < -2147483648LL || v > 2147483647LL) fail("integer out of 32-bit range");
        return (int)v;
    }

    int readInt(long long lo, long long hi, const std::string& var = "") {
        long long v = readLong();
        if (v < -2147483648LL || v > 2147483647LL) fail("integer out of 32-bit range");
        if (v < lo || v > hi)
            fail(format("%s=%lld violates the range [%lld, %lld]", var.empty() ? "value" : var.c_str(), v, lo, hi));
        return (int)v;
    }

    std::vector<int> readInts(int n, long long lo, long long hi, const std::string& var = "") {
        std::vector<int> out;
        out.reserve(n > 0 ? n : 0);
        for (int i = 0; i < n; i++) {
            if (i > 0 && strict) readSpace();
            out.push_back(readInt(lo, hi, var));
        }
        return out;
    }

    std::vector<long long> readLongs(int n, long long lo, long long hi, const std::string& var = "") {
        std::vector<long long> out;
        for (int i = 0; i < n; i++) {
            if (i > 0 && strict) readSpace();
            out.push_back(readLong(lo, hi, var));
        }
        return out;
    }

    std::string readLine() {
        size_t start = pos;
        while (!eof() && peek() != '\n') pos++;
        std::string line = data.substr(start, pos - start);
        if (!eof()) pos++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    std::string readString() { return readLine(); }

    void readSpace() {
        if (!strict) return;
        if (peek() != ' ') fail("expected space");
        pos++;
    }

    void readEoln() {
        if (!strict) return;
        if (peek() == '\r') pos++;
        if (peek() != '\n') fail("expected end of line");
        pos++;
    }

    void readEof() {
        if (!strict) {
            skipBlanks();
        }
        if (!eof()) fail("expected end of file");
    }
};

static InStream inf, ouf, ans;

inline std::string __testlib_read_all(FILE* f) {
    std::string s;
    char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) s.append(buf, n);
    return s;
}

inline std::string __testlib_read_file(const char* path) {
    FILE* f = std::fopen(path, "rb");
    if (!f) __testlib_quit(_fail, std::string("cannot open ") + path);
    std::string s = __testlib_read_all(f);
    std::fclose(f);
    return s;
}

inline void registerValidation() {
    __testlib_validator_mode = true;
    inf.init(__testlib_read_all(stdin), _fail, true, "input");
}

inline void registerValidation(int, char**) { registerValidation(); }

inline void registerTestlibCmd(int argc, char* argv[]) {
    if (argc < 4) __testlib_quit(_fail, "usage: checker <input> <output> <answer>");
    inf.init(__testlib_read_file(argv[1]), _fail, false, "input");
    ouf.init(__testlib_read_file(argv[2]), _pe, false, "output");
    ans.init(__testlib_read_file(argv[3]), _fail, false, "answer");
}

inline void registerGen(int, char**, int) {}

#define ensuref(cond, ...)                                           \
    do {                                                             \
        if (!(cond)) __testlib_quit(_fail, format(__VA_ARGS__));     \
    } while (0)

#define ensure(cond)                                                 \
    do {                                                             \
        if (!(cond)) __testlib_quit(_fail, "condition failed: " #cond); \
    } while (0)

#endif
