#include <bits/stdc++.h>
using namespace std;

// Place arrays smallest first, each into the smallest free power-of-two block.
int main() {
    int n, m;
    scanf("%d %d", &n, &m);
    long long avail[31] = {};
    for (int i = 0; i < n; i++) {
        long long a;
        scanf("%lld", &a);
        for (int k = 0; k < 31; k++)
            if (a >> k & 1) avail[k]++;
    }
    vector<int> cnt(31, 0);
    for (int j = 0; j < m; j++) {
        int b;
        scanf("%d", &b);
        cnt[b]++;
    }
    long long placed = 0;
    for (int b = 0; b < 31; b++) {
        for (; cnt[b] > 0; cnt[b]--) {
            int k = b;
            while (k < 31 && avail[k] == 0) k++;
            if (k == 31) break;
            avail[k]--;
            for (int j = b; j < k; j++) avail[j]++;
            placed++;
        }
        if (cnt[b] > 0) break;
    }
    printf("%lld\n", placed);
}
