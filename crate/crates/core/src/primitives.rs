//! Data-parallel building blocks used by index construction and the per-step
//! scheduler: flagged partition, stable radix sort of key/value pairs,
//! run-length encoding and exclusive scan.

/// Indices of the set flags, in order.
pub fn partition_flagged(flags: &[bool]) -> Vec<u32> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i as u32))
        .collect()
}

/// Exclusive prefix sum. The returned vector has one extra trailing entry
/// holding the total, so `out[i]..out[i + 1]` is the span of item `i`.
pub fn exclusive_scan(counts: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(counts.len() + 1);
    let mut acc = 0u32;
    out.push(0);
    for &c in counts {
        acc += c;
        out.push(acc);
    }
    out
}

/// Run-length encode a sorted key sequence into `(key, run length)` pairs.
pub fn run_length_encode(keys: &[u64]) -> (Vec<u64>, Vec<u32>) {
    let mut uniq = Vec::new();
    let mut lens: Vec<u32> = Vec::new();
    for &k in keys {
        match uniq.last() {
            Some(&last) if last == k => *lens.last_mut().unwrap() += 1,
            _ => {
                uniq.push(k);
                lens.push(1);
            }
        }
    }
    (uniq, lens)
}

/// Stable LSD radix sort of `(keys[i], vals[i])` pairs by key, eight bits per
/// pass. Digit positions on which every key agrees are skipped, so the number
/// of passes tracks the key range rather than the key width.
pub fn radix_sort_pairs(keys: &mut Vec<u64>, vals: &mut Vec<u32>) {
    let n = keys.len();
    assert_eq!(n, vals.len(), "radix sort needs one value per key");
    if n < 2 {
        return;
    }
    let mut hist = vec![[0u32; 256]; 8];
    for &k in keys.iter() {
        for (d, h) in hist.iter_mut().enumerate() {
            h[((k >> (8 * d)) & 0xff) as usize] += 1;
        }
    }
    let mut key_buf = vec![0u64; n];
    let mut val_buf = vec![0u32; n];
    for (d, h) in hist.iter().enumerate() {
        if h.iter().any(|&c| c as usize == n) {
            continue;
        }
        let mut offsets = [0u32; 256];
        let mut acc = 0u32;
        for (o, &c) in offsets.iter_mut().zip(h.iter()) {
            *o = acc;
            acc += c;
        }
        let shift = 8 * d;
        for (&k, &v) in keys.iter().zip(vals.iter()) {
            let b = ((k >> shift) & 0xff) as usize;
            let dst = offsets[b] as usize;
            key_buf[dst] = k;
            val_buf[dst] = v;
            offsets[b] += 1;
        }
        std::mem::swap(keys, &mut key_buf);
        std::mem::swap(vals, &mut val_buf);
    }
}

/// Stable LSD radix sort of `keys` on their bits above `low_bits` only; the
/// low bits act as a payload. Digit width adapts to the key range (at most
/// eleven bits), so a 20-bit range takes two passes.
pub fn radix_sort_high(keys: &mut Vec<u64>, low_bits: u32) {
    let n = keys.len();
    if n < 2 {
        return;
    }
    let (lo, hi) = keys.iter().fold((u64::MAX, 0), |(lo, hi), &k| {
        (lo.min(k >> low_bits), hi.max(k >> low_bits))
    });
    let bits = 64 - (hi - lo).leading_zeros();
    if bits == 0 {
        return;
    }
    let passes = bits.div_ceil(11) as usize;
    let width = bits.div_ceil(passes as u32);
    let mask = (1u64 << width) - 1;
    let digit = |k: u64, pass: usize| ((((k >> low_bits) - lo) >> (pass as u32 * width)) & mask) as usize;
    // All digit histograms in one read.
    let mut hist = vec![vec![0u32; 1 << width]; passes];
    for &k in keys.iter() {
        for (pass, h) in hist.iter_mut().enumerate() {
            h[digit(k, pass)] += 1;
        }
    }
    let mut buf = vec![0u64; n];
    for (pass, h) in hist.iter_mut().enumerate() {
        if h.iter().any(|&c| c as usize == n) {
            continue;
        }
        let mut acc = 0u32;
        for c in h.iter_mut() {
            let x = *c;
            *c = acc;
            acc += x;
        }
        for &k in keys.iter() {
            let d = digit(k, pass);
            buf[h[d] as usize] = k;
            h[d] += 1;
        }
        std::mem::swap(keys, &mut buf);
    }
}

/// Stable counting sort of items into `buckets` buckets. Returns the bucket
/// offsets (length `buckets + 1`) and the items grouped by bucket.
pub fn bucket_by_key<T, I>(buckets: usize, items: I) -> (Vec<u32>, Vec<T>)
where
    T: Copy + Default,
    I: Iterator<Item = (u32, T)> + Clone,
{
    let mut counts = vec![0u32; buckets];
    for (b, _) in items.clone() {
        counts[b as usize] += 1;
    }
    let offsets = exclusive_scan(&counts);
    let mut cursor: Vec<u32> = offsets[..buckets].to_vec();
    let mut out = vec![T::default(); offsets[buckets] as usize];
    for (b, v) in items {
        let slot = &mut cursor[b as usize];
        out[*slot as usize] = v;
        *slot += 1;
    }
    (offsets, out)
}
