"""
Built-in model kinds. Each module defines ``ENTRY_POINT``; see
`axiscascade.models.api`.
"""
