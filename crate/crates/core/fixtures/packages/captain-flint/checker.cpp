#include "testlib.h"
#include <algorithm>
#include <string>

static bool nearly_prime(long long x) {
    int factors = 0;
    for (long long p = 2; p * p <= x; p++) {
        if (x % p) continue;
        x /= p;
        if (x % p == 0) return false;
        factors++;
    }
    if (x > 1) factors++;
    return factors == 2;
}

static bool read_verdict(InStream& s) {
    std::string w = s.readToken();
    std::transform(w.begin(), w.end(), w.begin(), ::toupper);
    if (w != "YES" && w != "NO") s.quitf(s.failResult, "expected YES or NO, found \"%s\"", w.c_str());
    return w == "YES";
}

int main(int argc, char* argv[]) {
    registerTestlibCmd(argc, argv);
    int t = inf.readInt();
    for (int tc = 1; tc <= t; tc++) {
        long long n = inf.readLong();
        bool jury = read_verdict(ans);
        if (jury)
            for (int i = 0; i < 4; i++) ans.readLong();
        bool part = read_verdict(ouf);
        if (!part) {
            if (jury) quitf(_wa, "test %d: answer exists for n=%lld but participant printed NO", tc, n);
            continue;
        }
        long long v[4], sum = 0;
        int np = 0;
        for (int i = 0; i < 4; i++) {
            v[i] = ouf.readLong(1, n, "x");
            sum += v[i];
            np += nearly_prime(v[i]);
        }
        for (int i = 0; i < 4; i++)
            for (int j = i + 1; j < 4; j++)
                if (v[i] == v[j]) quitf(_wa, "test %d: numbers are not distinct (%lld repeated)", tc, v[i]);
        if (sum != n) quitf(_wa, "test %d: sum is %lld, expected %lld", tc, sum, n);
        if (np < 3) quitf(_wa, "test %d: only %d nearly prime numbers", tc, np);
        if (!jury) quitf(_fail, "test %d: participant found an answer the jury missed", tc);
    }
    if (!ouf.seekEof()) quitf(_wa, "extra output");
    quitf(_ok, "%d test cases", t);
}
