#include "testlib.h"
#include <vector>

// Exact check: the product of s! over the chosen set is a square iff every
// prime exponent in prod_m m^{c_m} is even, with c_m = #{s in set : s >= m}.
int main(int argc, char* argv[]) {
    registerTestlibCmd(argc, argv);
    int n = inf.readInt();
    int want = ans.readInt();
    int got = ouf.readInt(0, n, "size");
    if (got != want) quitf(_wa, "expected %d elements, found %d", want, got);
    std::vector<char> used(n + 2, 0);
    std::vector<int> cnt(n + 2, 0);
    for (int i = 0; i < got; i++) {
        int x = ouf.readInt(1, n, "element");
        if (used[x]) quitf(_wa, "element %d repeated", x);
        used[x] = 1;
        cnt[x]++;
    }
    if (!ouf.seekEof()) quitf(_wa, "extra output");
    std::vector<int> spf(n + 1, 0);
    for (int i = 2; i <= n; i++)
        if (!spf[i])
            for (int j = i; j <= n; j += i)
                if (!spf[j]) spf[j] = i;
    std::vector<char> parity(n + 1, 0);
    int c = 0;
    for (int m = n; m >= 2; m--) {
        c += cnt[m];
        if (!(c & 1)) continue;
        for (int x = m; x > 1;) {
            int p = spf[x], e = 0;
            while (x % p == 0) x /= p, e++;
            if (e & 1) parity[p] ^= 1;
        }
    }
    for (int p = 2; p <= n; p++)
        if (parity[p]) quitf(_wa, "product of factorials is not a square (prime %d)", p);
    quitf(_ok, "%d elements", got);
}
