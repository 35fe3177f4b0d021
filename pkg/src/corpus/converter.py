import warnings

from bs4 import BeautifulSoup, Comment, MarkupResemblesLocatorWarning

from ..config import setup_logging

# Configure logging for the converter module
logger = setup_logging()

UNWANTED_TAGS = ['script', 'style', 'noscript', 'nav', 'aside', 'footer', 'header']


def looks_like_markup(text):
    return "<" in text or "&" in text


def clean_markup(text):
    """
    Strip HTML markup and entities from a tweet or publication text.

    Comments and non-content elements are removed, entities such as '&amp;' are
    decoded and whitespace is collapsed. Plain text passes through unchanged.

    Args:
        text (str): Raw text, possibly containing HTML.

    Returns:
        str: The visible text.
    """
    if not text or not looks_like_markup(text):
        return text or ""

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MarkupResemblesLocatorWarning)
            soup = BeautifulSoup(text, 'html.parser')

        # Remove comments
        for comment in soup.find_all(string=lambda value: isinstance(value, Comment)):
            comment.extract()

        for element in soup.find_all(UNWANTED_TAGS):
            element.decompose()

        return " ".join(soup.get_text(separator=" ").split())

    except Exception as e:
        logger.error(f"[Converter] Markup cleaning failed: {e}")
        return text  # Return original text if cleaning fails
