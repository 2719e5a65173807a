#include "testlib.h"
#include <string>

int main(int argc, char* argv[]) {
    registerValidation(argc, argv);
    int n = inf.readInt(2, 100, "n");
    inf.readEoln();
    std::string s = inf.readToken();
    ensuref((int)s.size() == n, "expected %d digits, found %d", n, (int)s.size());
    for (char c : s) ensuref(c >= '0' && c <= '9', "non-digit character '%c'", c);
    inf.readEoln();
    inf.readEof();
}
