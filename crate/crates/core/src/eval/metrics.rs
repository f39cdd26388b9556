use crate::error::{Error, Result};
use crate::scene::{BinaryMask, RasterImage, CHANNELS};

const PEAK_SQUARED: f64 = 255.0 * 255.0;

/// PSNR between two images restricted to `mask`, over all three channels.
///
/// Identical content yields `psnr_cap`; every result is capped there.
pub fn region_psnr(
    src: &RasterImage,
    out: &RasterImage,
    mask: &BinaryMask,
    psnr_cap: f64,
) -> Result<f64> {
    src.ensure_same_dims(out)?;
    if mask.dims() != src.dims() {
        return Err(Error::DimensionMismatch {
            expected: src.dims(),
            actual: mask.dims(),
        });
    }
    let (a, b) = (src.data(), out.data());
    let mut sum: u64 = 0;
    let mut count: u64 = 0;
    for i in mask.indices() {
        for c in 0..CHANNELS {
            let d = a[i * CHANNELS + c] as i64 - b[i * CHANNELS + c] as i64;
            sum += (d * d) as u64;
        }
        count += CHANNELS as u64;
    }
    if count == 0 {
        return Err(Error::EmptyMask("region PSNR needs at least one pixel"));
    }
    if sum == 0 {
        return Ok(psnr_cap);
    }
    let mse = sum as f64 / count as f64;
    Ok((10.0 * (PEAK_SQUARED / mse).log10()).min(psnr_cap))
}

fn normalize(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// `1 - levenshtein(a, b) / max(|a|, |b|)` over case-folded strings with
/// whitespace runs collapsed. Two empty strings are identical.
pub fn text_similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (normalize(a), normalize(b));
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(&a, &b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook dynamic-programming edit distance.
    fn edit_distance(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in table.iter_mut().enumerate() {
            row[0] = i;
        }
        for (j, cell) in table[0].iter_mut().enumerate() {
            *cell = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let sub = table[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
                table[i][j] = sub.min(table[i - 1][j] + 1).min(table[i][j - 1] + 1);
            }
        }
        table[a.len()][b.len()]
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(text_similarity("Exit", "exit"), 1.0);
        assert_eq!(edit_distance("exit", "entrance"), 7);
        assert_eq!(text_similarity("Exit", "Entrance"), 1.0 - 7.0 / 8.0);
        assert_eq!(text_similarity("Exit", "Entrance"), 0.125);
        assert_eq!(text_similarity("", "60"), 0.0);
        assert_eq!(text_similarity("60", ""), 0.0);
        assert_eq!(text_similarity("", "   "), 1.0);
        assert_eq!(text_similarity("  60  /\tExit ", "60 / exit"), 1.0);
    }

    fn single_pixel(v: u8) -> RasterImage {
        RasterImage::filled(1, 1, [v, v, v]).unwrap()
    }

    #[test]
    fn psnr_examples() {
        let mask = BinaryMask::full(1, 1);
        let a = single_pixel(100);
        assert_eq!(region_psnr(&a, &a, &mask, 150.0).unwrap(), 150.0);
        let p = region_psnr(&a, &single_pixel(110), &mask, 150.0).unwrap();
        assert!((p - 10.0 * (65025.0f64 / 100.0).log10()).abs() < 1e-12);
        assert!((p - 28.131).abs() < 1e-3);
        assert_eq!(
            region_psnr(&single_pixel(0), &single_pixel(255), &mask, 150.0).unwrap(),
            0.0
        );
        assert!(matches!(
            region_psnr(&a, &a, &BinaryMask::new(1, 1), 150.0),
            Err(Error::EmptyMask(_))
        ));
    }

    #[test]
    fn psnr_only_reads_masked_pixels() {
        let a = RasterImage::new(2, 1, vec![0, 0, 0, 9, 9, 9]).unwrap();
        let b = RasterImage::new(2, 1, vec![0, 0, 0, 200, 1, 50]).unwrap();
        let left = BinaryMask::from_bits(2, 1, vec![true, false]);
        assert_eq!(region_psnr(&a, &b, &left, 150.0).unwrap(), 150.0);
        // the worst non-identical byte case stays far under the cap
        let big = RasterImage::filled(1000, 1000, [0, 0, 0]).unwrap();
        let mut off = big.clone();
        off.data_mut()[0] = 1;
        let p = region_psnr(&big, &off, &BinaryMask::full(1000, 1000), 150.0).unwrap();
        assert!(p < 150.0 && p > 100.0);
    }

    proptest! {
        #[test]
        fn similarity_matches_dp_oracle(a in "[a-cA-C ]{0,10}", b in "[a-cA-C ]{0,10}") {
            let (na, nb) = (normalize(&a), normalize(&b));
            let longest = na.chars().count().max(nb.chars().count());
            let expected = if longest == 0 { 1.0 } else { 1.0 - edit_distance(&na, &nb) as f64 / longest as f64 };
            let s = text_similarity(&a, &b);
            prop_assert_eq!(s, expected);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s, text_similarity(&b, &a));
            prop_assert_eq!(s == 1.0, na == nb);
        }

        #[test]
        fn psnr_is_symmetric(a in proptest::collection::vec(any::<u8>(), 12), b in proptest::collection::vec(any::<u8>(), 12)) {
            let ia = RasterImage::new(2, 2, a.clone()).unwrap();
            let ib = RasterImage::new(2, 2, b.clone()).unwrap();
            let m = BinaryMask::full(2, 2);
            let ab = region_psnr(&ia, &ib, &m, 150.0).unwrap();
            prop_assert_eq!(ab, region_psnr(&ib, &ia, &m, 150.0).unwrap());
            prop_assert_eq!(ab == 150.0, a == b);
        }
    }
}
