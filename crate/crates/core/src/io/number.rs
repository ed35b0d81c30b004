/// Scientific notation with at least ten significant digits, extended up to
/// seventeen until the text parses back to the identical `f64`.
pub fn format_float(x: f64) -> String {
    let mut text = String::new();
    for precision in 9..=16 {
        text = format!("{x:.precision$e}");
        if text.parse::<f64>().ok() == Some(x) {
            break;
        }
    }
    text
}
