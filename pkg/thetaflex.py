"""
Thetaflex - Laboratorium funkcji theta Riemanna
Aplikacja Streamlit do uruchamiania testów numerycznych: wartości theta,
rzędu Kummera, dopasowania danych przegięcia KP i śledzenia struktury
translacyjnej na dywizorze theta.
"""
import base64
import json
import tempfile
from io import BytesIO

import pandas as pd
import streamlit as st

from modules.config import (
    AVAILABLE_LANGUAGES, DEFAULT_LANGUAGE, DEFAULT_STARTS, DEFAULT_STEP,
    EXAMPLE_KINDS, EXIT_INVALID_INPUT, EXIT_OK, LANGUAGE_LABELS,
)
from modules.i18n import translate
from modules.io_cli import COMMANDS, generate_example, parse_document, run_job
from modules.errors import InvalidInputError

#############################################################################
# FUNKCJE POMOCNICZE
#############################################################################

def t(key: str) -> str:
    return translate(key, language=st.session_state.language)


def load_css():
    """Ładuje niestandardowy CSS."""
    st.markdown("""
    <style>
    .stApp {
        max-width: 1200px;
        margin: 0 auto;
    }
    h1, h2, h3 {
        color: #1E3A8A;
    }
    .info-box {
        background-color: #e0f7fa;
        border-left: 5px solid #0097a7;
        padding: 1rem;
        margin: 1rem 0;
        border-radius: 0 5px 5px 0;
    }
    </style>
    """, unsafe_allow_html=True)


def convert_df_to_csv_download_link(df: pd.DataFrame, filename: str = "data.csv") -> str:
    """Generuje link do pobrania DataFrame jako CSV."""
    csv = df.to_csv(index=False)
    b64 = base64.b64encode(csv.encode()).decode()
    return f'<a href="data:file/csv;base64,{b64}" download="{filename}">{t("download_csv")}</a>'


def create_excel_download_link(data_dict: dict, filename: str = "report.xlsx") -> str:
    """Generuje link do pobrania słownika DataFrame jako Excel (arkusz na tabelę)."""
    output = BytesIO()
    with pd.ExcelWriter(output, engine='openpyxl') as writer:
        for sheet_name, df in data_dict.items():
            df.to_excel(writer, sheet_name=sheet_name[:31], index=False)
    b64 = base64.b64encode(output.getvalue()).decode()
    return (f'<a href="data:application/vnd.openxmlformats-officedocument.spreadsheetml.sheet;base64,{b64}" '
            f'download="{filename}">{t("download_excel")}</a>')


def omega_frame(document: dict) -> pd.DataFrame:
    """Macierz Ω jako tabela napisów a+bj."""
    rows = [[f"{re:.6g}{im:+.6g}j" for re, im in row] for row in document['omega']]
    return pd.DataFrame(rows, columns=[f"{j + 1}" for j in range(document['g'])])


def results_frame(results: dict) -> pd.DataFrame:
    """Spłaszcza słownik wyników do tabeli klucz - wartość."""
    rows = []
    for key, value in results.items():
        if key == 'document':
            continue
        rows.append({'key': key, 'value': json.dumps(value) if isinstance(value, (list, dict)) else value})
    return pd.DataFrame(rows, columns=['key', 'value'])


#############################################################################
# APLIKACJA
#############################################################################

def main():
    st.set_page_config(
        page_title="Thetaflex | Laboratorium funkcji theta",
        page_icon="θ",
        layout="wide",
        initial_sidebar_state="expanded"
    )
    load_css()

    if 'language' not in st.session_state:
        st.session_state.language = DEFAULT_LANGUAGE
    if 'report' not in st.session_state:
        st.session_state.report = None
    if 'exit_code' not in st.session_state:
        st.session_state.exit_code = None

    st.markdown(f"""
    <h1 style="margin: 0;">Thetaflex</h1>
    <p style="margin-bottom: 2rem; color: #64748b; font-size: 1.1rem;">{t("app_subtitle")}</p>
    """, unsafe_allow_html=True)

    with st.sidebar:
        st.header(t("general_settings"))
        selected_language_label = st.selectbox(
            t("choose_language"),
            options=[LANGUAGE_LABELS[code] for code in AVAILABLE_LANGUAGES],
            index=AVAILABLE_LANGUAGES.index(st.session_state.language)
        )
        st.session_state.language = [code for code, label in LANGUAGE_LABELS.items()
                                     if label == selected_language_label][0]

        st.subheader(t("period_matrix"))
        source = st.radio(t("source"), ["example", "upload"],
                          format_func=lambda x: t(f"source_{x}"))
        seed = int(st.number_input(t("seed"), min_value=0, value=0, step=1))
        flags = {'seed': seed}
        omega_path = None
        if source == "example":
            kind = st.selectbox(t("example_kind"), EXAMPLE_KINDS, index=1)
            flags['example'] = kind
            flags['kind'] = kind
            document = generate_example(kind, seed).to_dict()
        else:
            uploaded = st.file_uploader(t("source_upload"), type=["json"])
            document = None
            if uploaded is not None:
                text = uploaded.getvalue().decode("utf-8")
                try:
                    document = parse_document(text).to_dict()
                except InvalidInputError as e:
                    st.error(f"{t('invalid_input')}: {e}")
                else:
                    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
                        handle.write(text)
                        omega_path = handle.name
                    flags['omega'] = omega_path

        st.subheader(t("job"))
        command = st.selectbox(t("job"), COMMANDS, index=0)
        flags['tol'] = float(st.number_input(t("tolerance"), min_value=1e-15, max_value=1e-2,
                                             value=1e-9, format="%.1e"))
        point = st.text_input(t("point"), value="")
        flags['z'] = point or None
        if command in ("kp-fit", "kp-check", "gw-test"):
            flags['starts'] = int(st.number_input(t("starts"), min_value=1, max_value=64,
                                                  value=DEFAULT_STARTS, step=1))
        if command == "translate-trace":
            flags['span'] = float(st.number_input(t("span"), min_value=0.01, max_value=2.0, value=0.5))
            flags['step'] = float(st.number_input(t("step"), min_value=1e-4, max_value=0.05,
                                                  value=DEFAULT_STEP, format="%.1e"))

        if st.button(t("run_job"), type="primary", use_container_width=True):
            if source == "upload" and omega_path is None:
                st.warning(t("invalid_input"))
            else:
                with st.spinner(command):
                    report, code = run_job(command, flags)
                st.session_state.report = report
                st.session_state.exit_code = code

    if document is not None:
        st.markdown(f"### {t('period_matrix')}")
        st.dataframe(omega_frame(document), use_container_width=True)

    report = st.session_state.report
    if report is None:
        st.info(t("no_data"))
    else:
        code = st.session_state.exit_code
        if code == EXIT_OK:
            st.success(t("passed"))
        elif code == EXIT_INVALID_INPUT:
            st.error(f"{t('invalid_input')}: {report.error['message']}")
        else:
            st.warning(t("failed") + (f": {report.error['message']}" if report.error else ""))

        tab1, tab2, tab3, tab4 = st.tabs([
            "✅ " + t("checks"),
            "📋 " + t("results"),
            "📊 " + t("data"),
            "🧾 " + t("report"),
        ])
        checks = report.checks_frame()
        results = results_frame(report.results)
        with tab1:
            st.dataframe(checks, use_container_width=True)
            st.metric(t("wall_time"), f"{report.wall_time:.2f}")
        with tab2:
            st.dataframe(results, use_container_width=True)
        with tab3:
            if report.data is not None:
                st.dataframe(report.data, use_container_width=True)
                st.markdown(convert_df_to_csv_download_link(report.data, f"{report.kind}.csv"),
                            unsafe_allow_html=True)
            else:
                st.info(t("no_data"))
        with tab4:
            st.json(report.to_dict())
            sheets = {'checks': checks, 'results': results}
            if report.data is not None:
                sheets['data'] = report.data
            st.markdown(create_excel_download_link(sheets, f"{report.kind}.xlsx"), unsafe_allow_html=True)

    st.markdown("---")
    st.markdown(f"""
    <div style="text-align: center; color: #64748b; font-size: 0.8rem; margin-top: 2rem;">
        <p>{t("footer")}</p>
    </div>
    """, unsafe_allow_html=True)


if __name__ == "__main__":
    main()
