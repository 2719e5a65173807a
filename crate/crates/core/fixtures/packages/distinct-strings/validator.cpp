#include "testlib.h"
#include <string>

int main(int argc, char* argv[]) {
    registerValidation(argc, argv);
    int n = inf.readInt(1, 100000, "n");
    inf.readEoln();
    long long total = 0;
    for (int i = 0; i < n; i++) {
        std::string s = inf.readToken();
        ensuref(s.size() <= 1000, "string %d longer than 1000", i + 1);
        for (char c : s) ensuref(c >= 'a' && c <= 'z', "string %d has a character outside a-z", i + 1);
        total += s.size();
        inf.readEoln();
    }
    ensuref(total <= 1000000, "total length %lld exceeds 10^6", total);
    inf.readEof();
}
